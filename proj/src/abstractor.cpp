#include "assertgen/abstractor.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "assertgen/errors.hpp"
#include "assertgen/util.hpp"

namespace assertgen {

Vocabulary::Vocabulary(std::vector<Entry> ranked, std::size_t capacity)
    : entries_(std::move(ranked)), capacity_(capacity) {
  if (entries_.size() > capacity_) entries_.resize(capacity_);
  for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(entries_[i].lexeme, i);
}

Vocabulary Vocabulary::build_from_sequences(const std::vector<const std::vector<std::string>*>& seqs,
                                            std::size_t capacity) {
  if (capacity == 0) throw InputError("vocabulary capacity must be at least 1");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto* seq : seqs) {
    for (const auto& t : *seq) ++counts[t];
  }
  if (counts.empty()) throw InputError("cannot build a vocabulary from an empty corpus");
  std::vector<Entry> all;
  all.reserve(counts.size());
  for (auto& [lexeme, freq] : counts) all.push_back(Entry{lexeme, freq});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.lexeme < b.lexeme;
  });
  std::vector<std::size_t> zipf;
  zipf.reserve(all.size());
  for (const auto& e : all) zipf.push_back(e.frequency);
  Vocabulary v(std::move(all), capacity);
  v.zipf_ = std::move(zipf);
  return v;
}

Vocabulary Vocabulary::build(const std::vector<miner::TapRecord>& taps, std::size_t capacity) {
  std::vector<const std::vector<std::string>*> seqs;
  seqs.reserve(taps.size() * 2);
  for (const auto& t : taps) {
    seqs.push_back(&t.context_tokens);
    seqs.push_back(&t.target_tokens);
  }
  return build_from_sequences(seqs, capacity);
}

bool Vocabulary::contains(std::string_view lexeme) const {
  return index_.find(std::string(lexeme)) != index_.end();
}

std::optional<std::size_t> Vocabulary::rank(std::string_view lexeme) const {
  auto it = index_.find(std::string(lexeme));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::coverage(const std::vector<miner::TapRecord>& taps) const {
  if (taps.empty()) return 0.0;
  std::size_t covered = 0;
  auto all_in = [&](const std::vector<std::string>& seq) {
    return std::all_of(seq.begin(), seq.end(), [&](const std::string& t) { return contains(t); });
  };
  for (const auto& t : taps) {
    if (all_in(t.context_tokens) && all_in(t.target_tokens)) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(taps.size());
}

std::string Vocabulary::to_tsv() const {
  std::string out;
  for (const auto& e : entries_) {
    out += e.lexeme;
    out += '\t';
    out += std::to_string(e.frequency);
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::from_tsv(std::string_view text) {
  std::vector<Entry> entries;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.rfind('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw InputError("vocabulary line " + std::to_string(line_no) + " has no lexeme<TAB>frequency");
    }
    std::size_t freq = 0;
    auto digits = line.substr(tab + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), freq);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      throw InputError("vocabulary line " + std::to_string(line_no) + " has a bad frequency");
    }
    entries.push_back(Entry{std::string(line.substr(0, tab)), freq});
  }
  std::size_t cap = entries.size();
  return Vocabulary(std::move(entries), cap);
}

namespace abstractor {

const std::vector<std::string>& term_prefixes() {
  static const std::vector<std::string> prefixes = {
      "METHOD", "IDENT",  "TYPE",   "ANNOTATION", "INT",  "LONG",
      "FLOAT",  "DOUBLE", "CHAR",   "STRING",     "BOOL", "NULL"};
  return prefixes;
}

std::string_view term_prefix(jlex::Category c) {
  using jlex::Category;
  switch (c) {
    case Category::METHOD: return "METHOD";
    case Category::TYPE_NAME: return "TYPE";
    case Category::ANNOTATION: return "ANNOTATION";
    case Category::INT_LIT: return "INT";
    case Category::LONG_LIT: return "LONG";
    case Category::FLOAT_LIT: return "FLOAT";
    case Category::DOUBLE_LIT: return "DOUBLE";
    case Category::CHAR_LIT: return "CHAR";
    case Category::STRING_LIT: return "STRING";
    case Category::BOOL_LIT: return "BOOL";
    case Category::NULL_LIT: return "NULL";
    default: return "IDENT";
  }
}

std::optional<std::pair<std::string, std::size_t>> parse_term(std::string_view token) {
  auto us = token.rfind('_');
  if (us == std::string_view::npos || us + 1 >= token.size()) return std::nullopt;
  std::string_view prefix = token.substr(0, us);
  std::string_view digits = token.substr(us + 1);
  const auto& prefixes = term_prefixes();
  if (std::find(prefixes.begin(), prefixes.end(), prefix) == prefixes.end()) return std::nullopt;
  if (digits.size() > 1 && digits[0] == '0') return std::nullopt;
  std::size_t k = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return std::make_pair(std::string(prefix), k);
}

bool is_term(std::string_view token) { return parse_term(token).has_value(); }

std::optional<std::size_t> AbstractTap::max_index() const {
  std::optional<std::size_t> best;
  for (const auto& [prefix, next] : map.next_index) {
    if (next > 0 && (!best || next - 1 > *best)) best = next - 1;
  }
  return best;
}

AbstractTap abstract_tap(const miner::TapRecord& tap, const Vocabulary& idioms) {
  AbstractTap out;
  out.raw_id = tap.id;
  auto& map = out.map;
  auto run = [&](const std::vector<std::string>& raw, std::vector<std::string>& dst) {
    jlex::TokenStream classified = jlex::classify(raw);
    dst.reserve(classified.size());
    for (const auto& tok : classified) {
      // An idiom spelled like a typed ID would be ambiguous on the way back.
      bool idiom = idioms.contains(tok.lexeme) && !is_term(tok.lexeme);
      if (idiom || !jlex::is_abstractable(tok.category)) {
        dst.push_back(tok.lexeme);
        continue;
      }
      auto it = map.forward.find(tok.lexeme);
      if (it != map.forward.end()) {
        dst.push_back(it->second);
        continue;
      }
      std::string prefix(term_prefix(tok.category));
      std::size_t k = map.next_index[prefix]++;
      std::string term = prefix + "_" + std::to_string(k);
      map.forward.emplace(tok.lexeme, term);
      map.backward.emplace(term, tok.lexeme);
      dst.push_back(std::move(term));
    }
  };
  run(tap.context_tokens, out.context_tokens);
  run(tap.target_tokens, out.target_tokens);
  return out;
}

UnabstractResult unabstract(const std::vector<std::string>& tokens, const AbstractionMap& map) {
  UnabstractResult r;
  r.tokens.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto it = map.backward.find(t);
    if (it != map.backward.end()) {
      r.tokens.push_back(it->second);
    } else {
      if (is_term(t)) r.unresolved.push_back(t);
      r.tokens.push_back(t);
    }
  }
  return r;
}

AbstractionMap map_from_forward(std::map<std::string, std::string> forward) {
  AbstractionMap m;
  for (const auto& [raw, term] : forward) {
    m.backward.emplace(term, raw);
    if (auto parsed = parse_term(term)) {
      auto& next = m.next_index[parsed->first];
      next = std::max(next, parsed->second + 1);
    }
  }
  m.forward = std::move(forward);
  return m;
}

AbstractionResult abstract_dataset(const std::vector<miner::TapRecord>& taps, const Vocabulary& idioms,
                                   std::size_t per_category_cap) {
  auto abstracted = parallel_map<AbstractTap>(
      taps.size(), [&](std::size_t i) { return abstract_tap(taps[i], idioms); });
  AbstractionResult result;
  result.report.input_count = taps.size();
  std::set<std::pair<std::vector<std::string>, std::vector<std::string>>> seen;
  for (auto& a : abstracted) {
    auto top = a.max_index();
    if (top && *top >= per_category_cap) {
      ++result.report.removed_id_overflow;
      continue;
    }
    if (!seen.emplace(a.context_tokens, a.target_tokens).second) {
      ++result.report.removed_duplicate;
      continue;
    }
    result.kept.push_back(std::move(a));
  }
  result.report.kept = result.kept.size();
  return result;
}

}  // namespace abstractor
}  // namespace assertgen
