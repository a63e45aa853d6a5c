#pragma once

// Frequency vocabulary, typed-ID abstraction of TAPs, and the mapping back to
// raw source.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "assertgen/jlex.hpp"
#include "assertgen/miner.hpp"

namespace assertgen {

/// Rank-ordered token table: descending frequency, ties lexicographic.
class Vocabulary {
 public:
  struct Entry {
    std::string lexeme;
    std::size_t frequency = 0;
    bool operator==(const Entry&) const = default;
  };

  Vocabulary() = default;
  Vocabulary(std::vector<Entry> ranked, std::size_t capacity);

  /// Counts every context and target token. Throws InputError when the corpus
  /// holds no tokens or capacity is zero.
  static Vocabulary build(const std::vector<miner::TapRecord>& taps, std::size_t capacity = 1000);

  /// Same, over arbitrary token sequences.
  static Vocabulary build_from_sequences(const std::vector<const std::vector<std::string>*>& seqs,
                                         std::size_t capacity);

  bool contains(std::string_view lexeme) const;
  std::optional<std::size_t> rank(std::string_view lexeme) const;
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Rank/frequency pairs over all distinct lexemes seen during build,
  /// not only the retained ones.
  const std::vector<std::size_t>& zipf() const { return zipf_; }

  /// Fraction of TAPs whose context and target tokens are all retained.
  double coverage(const std::vector<miner::TapRecord>& taps) const;

  /// `lexeme<TAB>frequency` per line, rank order.
  std::string to_tsv() const;
  static Vocabulary from_tsv(std::string_view text);

  bool operator==(const Vocabulary& other) const { return entries_ == other.entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> zipf_;
  std::size_t capacity_ = 0;
};

namespace abstractor {

/// Prefixes of the typed IDs, one per abstractable lexer category.
std::string_view term_prefix(jlex::Category c);

/// Parses "PREFIX_k"; nullopt for anything that is not a typed ID.
std::optional<std::pair<std::string, std::size_t>> parse_term(std::string_view token);

bool is_term(std::string_view token);

/// Every prefix, in a fixed order.
const std::vector<std::string>& term_prefixes();

struct AbstractionMap {
  std::map<std::string, std::string> forward;   // raw -> term
  std::map<std::string, std::string> backward;  // term -> raw
  std::map<std::string, std::size_t> next_index;  // prefix -> next k
};

struct AbstractTap {
  std::vector<std::string> context_tokens;
  std::vector<std::string> target_tokens;
  AbstractionMap map;
  std::string raw_id;

  /// Largest k used for any prefix, or nullopt when no IDs were issued.
  std::optional<std::size_t> max_index() const;
};

/// Abstracts context then target, left to right, in isolation from any other
/// TAP. Idioms and keyword/operator/separator tokens stay raw.
AbstractTap abstract_tap(const miner::TapRecord& tap, const Vocabulary& idioms);

struct UnabstractResult {
  std::vector<std::string> tokens;
  std::vector<std::string> unresolved;  // typed IDs missing from the map
};

UnabstractResult unabstract(const std::vector<std::string>& tokens, const AbstractionMap& map);

/// Rebuilds the backward map (and counters) from a forward map.
AbstractionMap map_from_forward(std::map<std::string, std::string> forward);

struct AbstractionReport {
  std::size_t input_count = 0;
  std::size_t removed_id_overflow = 0;
  std::size_t removed_duplicate = 0;
  std::size_t kept = 0;
};

struct AbstractionResult {
  std::vector<AbstractTap> kept;
  AbstractionReport report;
};

/// Abstracts a whole dataset, dropping TAPs whose typed IDs reach the
/// per-prefix cap and abstract duplicates.
AbstractionResult abstract_dataset(const std::vector<miner::TapRecord>& taps, const Vocabulary& idioms,
                                   std::size_t per_category_cap = 30);

}  // namespace abstractor
}  // namespace assertgen
