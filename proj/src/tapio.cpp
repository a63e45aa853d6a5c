#include "assertgen/tapio.hpp"

#include <fstream>
#include <sstream>

#include "assertgen/errors.hpp"
#include "assertgen/util.hpp"
#include "json.hpp"

namespace assertgen::tapio {

using nlohmann::ordered_json;

namespace {

std::string dump_line(const ordered_json& j) {
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

ordered_json parse_line(std::string_view line, std::size_t line_no) {
  try {
    return ordered_json::parse(line);
  } catch (const ordered_json::exception& e) {
    throw InputError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

std::vector<std::string> tokens_field(const ordered_json& j, const char* key, std::size_t line_no) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw InputError("line " + std::to_string(line_no) + ": missing string field '" + key + "'");
  }
  return jlex::split_lexemes(j.at(key).get<std::string>());
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

std::vector<std::string_view> jsonl_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) out.push_back(line);
    pos = nl + 1;
  }
  return out;
}

std::string taps_to_jsonl(const std::vector<miner::TapRecord>& taps) {
  std::string out;
  for (const auto& t : taps) {
    ordered_json j;
    j["id"] = t.id;
    j["context"] = join_tokens(t.context_tokens);
    j["target"] = join_tokens(t.target_tokens);
    j["focal_signature"] = t.focal_signature ? ordered_json(*t.focal_signature) : ordered_json(nullptr);
    out += dump_line(j);
  }
  return out;
}

std::vector<miner::TapRecord> taps_from_jsonl(std::string_view text) {
  std::vector<miner::TapRecord> out;
  std::size_t line_no = 0;
  for (auto line : jsonl_lines(text)) {
    ++line_no;
    auto j = parse_line(line, line_no);
    miner::TapRecord t;
    t.context_tokens = tokens_field(j, "context", line_no);
    t.target_tokens = tokens_field(j, "target", line_no);
    if (j.contains("id") && j.at("id").is_string()) {
      t.id = j.at("id").get<std::string>();
    } else {
      t.id = miner::tap_id(t.context_tokens, t.target_tokens);
    }
    if (j.contains("focal_signature") && j.at("focal_signature").is_string()) {
      t.focal_signature = j.at("focal_signature").get<std::string>();
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::string abstract_taps_to_jsonl(const std::vector<abstractor::AbstractTap>& taps) {
  std::string out;
  for (const auto& t : taps) {
    ordered_json j;
    j["raw_id"] = t.raw_id;
    j["context"] = join_tokens(t.context_tokens);
    j["target"] = join_tokens(t.target_tokens);
    ordered_json map = ordered_json::object();
    for (const auto& [raw, term] : t.map.forward) map[raw] = term;
    j["map"] = std::move(map);
    out += dump_line(j);
  }
  return out;
}

std::vector<abstractor::AbstractTap> abstract_taps_from_jsonl(std::string_view text) {
  std::vector<abstractor::AbstractTap> out;
  std::size_t line_no = 0;
  for (auto line : jsonl_lines(text)) {
    ++line_no;
    auto j = parse_line(line, line_no);
    abstractor::AbstractTap t;
    t.context_tokens = tokens_field(j, "context", line_no);
    t.target_tokens = tokens_field(j, "target", line_no);
    t.raw_id = j.value("raw_id", std::string());
    std::map<std::string, std::string> forward;
    if (j.contains("map")) {
      if (!j.at("map").is_object()) throw InputError("line " + std::to_string(line_no) + ": 'map' is not an object");
      for (const auto& [raw, term] : j.at("map").items()) {
        if (!term.is_string()) throw InputError("line " + std::to_string(line_no) + ": non-string map value");
        forward.emplace(raw, term.get<std::string>());
      }
    }
    t.map = abstractor::map_from_forward(std::move(forward));
    out.push_back(std::move(t));
  }
  return out;
}

std::string filter_report_json(const miner::FilterReport& r) {
  ordered_json j;
  j["input_count"] = r.input_count;
  j["removed_long"] = r.removed_long;
  j["removed_unknown"] = r.removed_unknown;
  j["removed_duplicate"] = r.removed_duplicate;
  j["kept"] = r.kept;
  return j.dump(2) + "\n";
}

miner::FilterReport filter_report_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
    miner::FilterReport r;
    r.input_count = j.at("input_count").get<std::size_t>();
    r.removed_long = j.at("removed_long").get<std::size_t>();
    r.removed_unknown = j.at("removed_unknown").get<std::size_t>();
    r.removed_duplicate = j.at("removed_duplicate").get<std::size_t>();
    r.kept = j.at("kept").get<std::size_t>();
    return r;
  } catch (const ordered_json::exception& e) {
    throw InputError(std::string("bad filter report: ") + e.what());
  }
}

}  // namespace assertgen::tapio
