#include "assertgen/miner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <tuple>

#include "assertgen/abstractor.hpp"
#include "assertgen/errors.hpp"
#include "assertgen/util.hpp"

namespace assertgen::miner {
namespace fs = std::filesystem;
using jlex::Category;
using jlex::TokenStream;

namespace {

bool is_named(Category c) {
  return c == Category::IDENT || c == Category::METHOD || c == Category::TYPE_NAME;
}

// Index of the bracket closing the one at `open`, or tokens.size().
std::size_t match_close(const TokenStream& t, std::size_t open) {
  const std::string& o = t[open].lexeme;
  std::string c = o == "(" ? ")" : o == "{" ? "}" : "]";
  int depth = 0;
  for (std::size_t i = open; i < t.size(); ++i) {
    if (t[i].lexeme == o) {
      ++depth;
    } else if (t[i].lexeme == c) {
      if (--depth == 0) return i;
    }
  }
  return t.size();
}

std::size_t find_from(const TokenStream& t, std::size_t from, std::size_t end, std::string_view lex) {
  for (std::size_t i = from; i < end; ++i) {
    if (t[i].lexeme == lex) return i;
  }
  return end;
}

bool opens_type(const TokenStream& t, std::size_t i) {
  const std::string& l = t[i].lexeme;
  if (l == "@interface") return true;
  if (l != "class" && l != "interface" && l != "enum") return false;
  return i == 0 || t[i - 1].lexeme != ".";
}

// Splits the parameter list between parentheses into per-parameter types.
std::vector<std::string> parameter_types(const TokenStream& t, std::size_t open, std::size_t close) {
  std::vector<std::string> types;
  std::vector<const jlex::JavaToken*> current;
  auto flush = [&] {
    std::vector<const jlex::JavaToken*> kept;
    for (std::size_t k = 0; k < current.size(); ++k) {
      const auto* tok = current[k];
      if (tok->category == Category::ANNOTATION) {
        if (k + 1 < current.size() && current[k + 1]->lexeme == "(") {
          int depth = 0;
          for (++k; k < current.size(); ++k) {
            if (current[k]->lexeme == "(") ++depth;
            if (current[k]->lexeme == ")" && --depth == 0) break;
          }
        }
        continue;
      }
      if (tok->lexeme == "final") continue;
      kept.push_back(tok);
    }
    if (kept.size() >= 2) {
      std::string type;
      for (std::size_t k = 0; k + 1 < kept.size(); ++k) type += kept[k]->lexeme;
      types.push_back(type);
    } else if (kept.size() == 1) {
      types.push_back(kept[0]->lexeme);
    }
    current.clear();
  };
  int depth = 0;
  for (std::size_t i = open + 1; i < close; ++i) {
    const std::string& l = t[i].lexeme;
    if (l == "(" || l == "<" || l == "[") ++depth;
    if (l == ")" || l == ">" || l == "]") --depth;
    if (l == ">>") depth -= 2;
    if (l == ">>>") depth -= 3;
    if (l == "," && depth == 0) {
      flush();
      continue;
    }
    current.push_back(&t[i]);
  }
  flush();
  return types;
}

class MemberScanner {
 public:
  MemberScanner(const TokenStream& t, const std::string& file, const std::string& project)
      : t_(t), file_(file), project_(project) {}

  std::vector<MethodRecord> run() {
    std::size_t i = 0;
    while (i < t_.size()) {
      if (opens_type(t_, i)) {
        i = enter_type(i);
      } else {
        ++i;
      }
    }
    return std::move(out_);
  }

 private:
  // Returns the index just past the type body.
  std::size_t enter_type(std::size_t kw) {
    std::size_t open = find_from(t_, kw, t_.size(), "{");
    if (open == t_.size()) return t_.size();
    std::size_t close = match_close(t_, open);
    members(open + 1, std::min(close, t_.size()));
    return close + 1;
  }

  void members(std::size_t b, std::size_t e) {
    std::size_t i = b;
    std::size_t start = b;
    while (i < e) {
      const auto& tok = t_[i];
      const std::string& l = tok.lexeme;
      if (l == ";") {
        start = ++i;
      } else if (l == "{") {
        i = match_close(t_, i) + 1;
        start = i;
      } else if (opens_type(t_, i)) {
        i = enter_type(i);
        start = i;
      } else if (l == "=") {
        i = skip_field(i, e);
        start = i;
      } else if (l == "(") {
        i = match_close(t_, i) + 1;
      } else if (is_named(tok.category) && i + 1 < e && t_[i + 1].lexeme == "(" &&
                 (i == 0 || (t_[i - 1].lexeme != "new" && t_[i - 1].lexeme != "."))) {
        std::size_t close = match_close(t_, i + 1);
        std::size_t j = close + 1;
        while (j < e && t_[j].lexeme == "[") j = match_close(t_, j) + 1;
        if (j < e && t_[j].lexeme == "throws") {
          while (j < e && t_[j].lexeme != "{" && t_[j].lexeme != ";") ++j;
        }
        if (j < e && t_[j].lexeme == "{") {
          std::size_t body_close = match_close(t_, j);
          record(start, i, i + 1, close, std::min(body_close, t_.size() - 1));
          i = body_close + 1;
          start = i;
        } else if (j < e && t_[j].lexeme == ";") {
          i = j + 1;
          start = i;
        } else {
          i = close + 1;
        }
      } else {
        ++i;
      }
    }
  }

  std::size_t skip_field(std::size_t i, std::size_t e) {
    while (i < e) {
      const std::string& l = t_[i].lexeme;
      if (l == "(" || l == "{" || l == "[") {
        i = match_close(t_, i) + 1;
      } else if (l == ";") {
        return i + 1;
      } else {
        ++i;
      }
    }
    return e;
  }

  void record(std::size_t start, std::size_t name, std::size_t open, std::size_t close,
              std::size_t body_close) {
    MethodRecord m;
    m.name = t_[name].lexeme;
    auto types = parameter_types(t_, open, close);
    m.arity = types.size();
    m.signature = m.name + "(" + join_tokens(types, ",") + ")";
    for (std::size_t k = start; k <= body_close; ++k) {
      if (k < name && t_[k].category == Category::ANNOTATION) {
        m.annotations.push_back(t_[k].lexeme);
        if (k + 1 < name && t_[k + 1].lexeme == "(") k = match_close(t_, k + 1);
        continue;
      }
      m.tokens.push_back(t_[k]);
    }
    m.is_test = std::any_of(m.annotations.begin(), m.annotations.end(), [](const std::string& a) {
      return a == "@Test" || a == "@org.junit.Test";
    });
    m.project_id = project_;
    m.file = file_;
    m.decl_index = out_.size();
    out_.push_back(std::move(m));
  }

  const TokenStream& t_;
  const std::string& file_;
  const std::string& project_;
  std::vector<MethodRecord> out_;
};

struct Call {
  std::size_t pos;
  std::size_t arity;
  int depth;
  std::size_t statement;
};

std::size_t call_arity(const TokenStream& t, std::size_t open) {
  std::size_t close = match_close(t, open);
  if (close == open + 1 || close >= t.size()) return 0;
  std::size_t commas = 0;
  int depth = 0;
  for (std::size_t i = open + 1; i < close; ++i) {
    const std::string& l = t[i].lexeme;
    if (l == "(" || l == "{" || l == "[") ++depth;
    if (l == ")" || l == "}" || l == "]") --depth;
    if (l == "," && depth == 0) ++commas;
  }
  return commas + 1;
}

std::vector<Call> body_calls(const TokenStream& t) {
  std::vector<Call> calls;
  std::size_t body = find_from(t, 0, t.size(), "{");
  int depth = 0;
  std::size_t statement = 0;
  for (std::size_t i = body; i < t.size(); ++i) {
    const std::string& l = t[i].lexeme;
    if (l == "(") ++depth;
    if (l == ")") --depth;
    if ((l == ";" || l == "{" || l == "}") && depth == 0) ++statement;
    if (t[i].category == Category::METHOD && i + 1 < t.size() && t[i + 1].lexeme == "(") {
      calls.push_back(Call{i, call_arity(t, i + 1), depth, statement});
    }
  }
  return calls;
}

// Latest statement wins, then the outermost call in it, then the later one.
const Call* pick_call(const std::vector<const Call*>& candidates) {
  const Call* best = nullptr;
  for (const Call* c : candidates) {
    if (!best || c->statement > best->statement ||
        (c->statement == best->statement && c->depth <= best->depth)) {
      best = c;
    }
  }
  return best;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<std::string> element_text(std::string_view block, std::string_view tag) {
  std::string open = "<" + std::string(tag) + ">";
  std::string close = "</" + std::string(tag) + ">";
  auto b = block.find(open);
  if (b == std::string_view::npos) return std::nullopt;
  b += open.size();
  auto e = block.find(close, b);
  if (e == std::string_view::npos) return std::nullopt;
  return trim(block.substr(b, e - b));
}

std::string strip_xml_comments(std::string_view text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto b = text.find("<!--", pos);
    if (b == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, b - pos));
    auto e = text.find("-->", b + 4);
    if (e == std::string_view::npos) break;
    pos = e + 3;
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const std::vector<std::string>& assert_names() {
  static const std::vector<std::string> names = {
      "assertEquals", "assertTrue",  "assertNotNull",     "assertThat",
      "assertNull",   "assertFalse", "assertArrayEquals", "assertSame"};
  return names;
}

std::string tap_id(const std::vector<std::string>& context, const std::vector<std::string>& target) {
  Fnv1a64 h;
  for (const auto& t : context) {
    h.update(t);
    h.update("\x1f", 1);
  }
  h.update("\x1e", 1);
  for (const auto& t : target) {
    h.update(t);
    h.update("\x1f", 1);
  }
  return h.hex();
}

bool scan_pom(std::string_view pom_text) {
  std::string text = strip_xml_comments(pom_text);
  std::map<std::string, std::string> properties;
  if (auto props = element_text(text, "properties")) {
    std::size_t pos = 0;
    while ((pos = props->find('<', pos)) != std::string::npos) {
      auto gt = props->find('>', pos);
      if (gt == std::string::npos || (*props)[pos + 1] == '/') {
        pos = gt == std::string::npos ? props->size() : gt + 1;
        continue;
      }
      std::string name = props->substr(pos + 1, gt - pos - 1);
      if (auto value = element_text(std::string_view(*props).substr(pos), name)) {
        properties[name] = *value;
      }
      pos = gt + 1;
    }
  }
  auto resolve = [&](std::string v) {
    if (v.size() > 3 && v.starts_with("${") && v.back() == '}') {
      auto it = properties.find(v.substr(2, v.size() - 3));
      if (it != properties.end()) return it->second;
    }
    return v;
  };

  std::size_t pos = 0;
  while ((pos = text.find("<dependency>", pos)) != std::string::npos) {
    auto end = text.find("</dependency>", pos);
    if (end == std::string::npos) {
      std::cerr << "assertgen: malformed pom (unclosed <dependency>), treating as non-JUnit4\n";
      return false;
    }
    std::string_view block(text.data() + pos, end - pos);
    auto group = element_text(block, "groupId");
    auto artifact = element_text(block, "artifactId");
    auto version = element_text(block, "version");
    if (group && artifact && version && *group == "junit" && *artifact == "junit" &&
        resolve(*version).starts_with("4.")) {
      return true;
    }
    pos = end;
  }
  return false;
}

std::vector<MethodRecord> extract_from_tokens(const TokenStream& tokens, const std::string& file,
                                              const std::string& project_id) {
  return MemberScanner(tokens, file, project_id).run();
}

ExtractionResult extract_methods(const std::vector<SourceFile>& files, const std::string& project_id) {
  ExtractionResult result;
  for (const auto& f : files) {
    try {
      auto tokens = jlex::lex(f.text);
      auto methods = extract_from_tokens(tokens, f.path, project_id);
      for (auto& m : methods) result.methods.push_back(std::move(m));
    } catch (const jlex::LexError& e) {
      result.skipped_files.push_back(f.path + ": " + e.what());
    }
  }
  return result;
}

std::vector<AssertSpan> find_asserts(const TokenStream& t) {
  const auto& names = assert_names();
  std::vector<AssertSpan> spans;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].category != Category::METHOD || i + 1 >= t.size() || t[i + 1].lexeme != "(") continue;
    if (std::find(names.begin(), names.end(), t[i].lexeme) == names.end()) continue;
    std::size_t begin = i;
    if (i >= 1 && t[i - 1].lexeme == ".") {
      if (i < 2 || t[i - 2].lexeme != "Assert") continue;
      begin = i - 2;
      bool preceded_by_dot = i >= 3 && t[i - 3].lexeme == ".";
      if (preceded_by_dot) {
        if (i >= 6 && t[i - 6].lexeme == "org" && t[i - 5].lexeme == "." &&
            t[i - 4].lexeme == "junit") {
          begin = i - 6;
        } else {
          continue;
        }
      }
    }
    std::size_t close = match_close(t, i + 1);
    if (close >= t.size()) continue;
    spans.push_back(AssertSpan{begin, close + 1, t[i].lexeme});
  }
  return spans;
}

std::optional<MethodRecord> find_focal_method(const MethodRecord& test,
                                              const std::vector<MethodRecord>& pool) {
  auto asserts = find_asserts(test.tokens);
  if (asserts.empty()) return std::nullopt;
  const AssertSpan& a = asserts.front();

  std::map<std::pair<std::string, std::size_t>, std::vector<const MethodRecord*>> index;
  for (const auto& m : pool) {
    if (!m.is_test) index[{m.name, m.arity}].push_back(&m);
  }
  auto lookup = [&](const Call& c) -> const std::vector<const MethodRecord*>* {
    auto it = index.find({test.tokens[c.pos].lexeme, c.arity});
    return it == index.end() ? nullptr : &it->second;
  };

  auto calls = body_calls(test.tokens);
  std::size_t assert_name_pos = a.end;
  for (std::size_t i = a.begin; i < a.end; ++i) {
    if (test.tokens[i].lexeme == a.name && test.tokens[i].category == Category::METHOD) {
      assert_name_pos = i;
      break;
    }
  }
  std::vector<const Call*> inside;
  std::vector<const Call*> before;
  for (const auto& c : calls) {
    if (c.pos == assert_name_pos || !lookup(c)) continue;
    if (c.pos > a.begin && c.pos < a.end) inside.push_back(&c);
    if (c.pos < a.begin) before.push_back(&c);
  }
  const Call* chosen = nullptr;
  if (!inside.empty()) {
    // One statement: prefer the outermost, then the later call.
    for (const Call* c : inside) {
      if (!chosen || c->depth <= chosen->depth) chosen = c;
    }
  } else {
    chosen = pick_call(before);
  }
  if (!chosen) return std::nullopt;

  std::vector<const MethodRecord*> matches = *lookup(*chosen);
  std::sort(matches.begin(), matches.end(), [&](const MethodRecord* x, const MethodRecord* y) {
    return std::make_tuple(x->file != test.file, x->file, x->decl_index, x->signature) <
           std::make_tuple(y->file != test.file, y->file, y->decl_index, y->signature);
  });
  return *matches.front();
}

TapRecord assemble_tap(const MethodRecord& test, const std::optional<MethodRecord>& focal) {
  auto asserts = find_asserts(test.tokens);
  if (asserts.empty()) throw TapError(TapError::Kind::NoAssert);
  if (asserts.size() > 1) throw TapError(TapError::Kind::MultipleAsserts);
  const AssertSpan& a = asserts.front();

  TapRecord tap;
  for (std::size_t i = 0; i < a.begin; ++i) tap.context_tokens.push_back(test.tokens[i].lexeme);
  tap.context_tokens.emplace_back(kPlaceholder);
  for (std::size_t i = a.end; i < test.tokens.size(); ++i) {
    tap.context_tokens.push_back(test.tokens[i].lexeme);
  }
  for (std::size_t i = a.begin; i < a.end; ++i) tap.target_tokens.push_back(test.tokens[i].lexeme);
  if (focal) {
    for (const auto& t : focal->tokens) tap.context_tokens.push_back(t.lexeme);
    tap.focal_signature = focal->signature;
  }
  tap.id = tap_id(tap.context_tokens, tap.target_tokens);
  return tap;
}

std::vector<std::string> restore_test_tokens(const TapRecord& tap, std::size_t focal_token_count) {
  std::vector<std::string> out;
  std::size_t n = tap.context_tokens.size() - std::min(focal_token_count, tap.context_tokens.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (tap.context_tokens[i] == kPlaceholder) {
      out.insert(out.end(), tap.target_tokens.begin(), tap.target_tokens.end());
    } else {
      out.push_back(tap.context_tokens[i]);
    }
  }
  return out;
}

FilterResult filter_taps(const std::vector<TapRecord>& taps, const Vocabulary& vocab,
                         std::size_t max_context_tokens) {
  FilterResult result;
  result.report.input_count = taps.size();
  std::set<std::pair<std::vector<std::string>, std::vector<std::string>>> seen;
  for (const auto& tap : taps) {
    if (tap.context_tokens.size() > max_context_tokens) {
      ++result.report.removed_long;
      continue;
    }
    std::set<std::string_view> context(tap.context_tokens.begin(), tap.context_tokens.end());
    bool unknown = std::any_of(tap.target_tokens.begin(), tap.target_tokens.end(),
                               [&](const std::string& t) { return !vocab.contains(t) && !context.contains(t); });
    if (unknown) {
      ++result.report.removed_unknown;
      continue;
    }
    if (!seen.emplace(tap.context_tokens, tap.target_tokens).second) {
      ++result.report.removed_duplicate;
      continue;
    }
    result.kept.push_back(tap);
  }
  result.report.kept = result.kept.size();
  return result;
}

Split split_dataset(const std::vector<TapRecord>& taps, SplitRatios r, std::uint64_t seed) {
  if (taps.empty()) throw InputError("split_dataset: empty dataset");
  if (r.train < 0 || r.validation < 0 || r.test < 0 ||
      std::abs(r.train + r.validation + r.test - 1.0) > 1e-9) {
    throw InputError("split_dataset: ratios must be non-negative and sum to 1");
  }
  std::vector<std::size_t> order(taps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const double n = static_cast<double>(taps.size());
  auto b1 = std::min(taps.size(), static_cast<std::size_t>(std::llround(n * r.train)));
  auto b2 = std::min(taps.size(),
                     std::max(b1, static_cast<std::size_t>(std::llround(n * (r.train + r.validation)))));
  Split s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& dst = i < b1 ? s.train : i < b2 ? s.validation : s.test;
    dst.push_back(taps[order[i]]);
  }
  return s;
}

std::vector<TapRecord> mine_corpus(const fs::path& corpus_dir, const CorpusOptions& options,
                                   MiningStats& stats) {
  if (!fs::is_directory(corpus_dir)) {
    throw InputError("corpus directory does not exist: " + corpus_dir.string());
  }
  std::vector<fs::path> projects;
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    if (entry.is_directory()) projects.push_back(entry.path());
  }
  if (projects.empty() || fs::exists(corpus_dir / "pom.xml")) projects = {corpus_dir};
  std::sort(projects.begin(), projects.end());

  struct ProjectResult {
    std::vector<TapRecord> taps;
    MiningStats stats;
  };

  auto results = parallel_map<ProjectResult>(projects.size(), [&](std::size_t p) {
    ProjectResult r;
    const fs::path& root = projects[p];
    r.stats.projects = 1;
    fs::path pom = root / "pom.xml";
    bool junit4 = fs::exists(pom) && scan_pom(read_file(pom));
    if (options.require_junit4 && !junit4) {
      r.stats.projects_skipped = 1;
      return r;
    }
    std::vector<SourceFile> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file() && entry.path().extension() == ".java") {
        files.push_back(SourceFile{fs::relative(entry.path(), root).generic_string(),
                                   read_file(entry.path())});
      }
    }
    std::sort(files.begin(), files.end(),
              [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
    r.stats.files = files.size();

    std::string project_id = fs::relative(root, corpus_dir).generic_string();
    auto extracted = extract_methods(files, project_id);
    r.stats.files_skipped = extracted.skipped_files.size();
    for (const auto& s : extracted.skipped_files) std::cerr << "assertgen: skipped " << s << "\n";

    for (const auto& m : extracted.methods) {
      if (!m.is_test) continue;
      ++r.stats.test_methods;
      try {
        auto focal = find_focal_method(m, extracted.methods);
        auto tap = assemble_tap(m, focal);
        if (focal) ++r.stats.with_focal;
        r.taps.push_back(std::move(tap));
      } catch (const TapError& e) {
        if (e.kind() == TapError::Kind::NoAssert) {
          ++r.stats.no_assert;
        } else {
          ++r.stats.multiple_asserts;
        }
      }
    }
    return r;
  });

  std::vector<TapRecord> taps;
  for (auto& r : results) {
    stats.projects += r.stats.projects;
    stats.projects_skipped += r.stats.projects_skipped;
    stats.files += r.stats.files;
    stats.files_skipped += r.stats.files_skipped;
    stats.test_methods += r.stats.test_methods;
    stats.no_assert += r.stats.no_assert;
    stats.multiple_asserts += r.stats.multiple_asserts;
    stats.with_focal += r.stats.with_focal;
    for (auto& t : r.taps) taps.push_back(std::move(t));
  }
  return taps;
}

}  // namespace assertgen::miner
