#pragma once

// Prediction metrics, baselines and the timing harness.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "assertgen/abstractor.hpp"
#include "assertgen/miner.hpp"

namespace assertgen::evalkit {

using Tokens = std::vector<std::string>;

bool perfect_prediction(const std::vector<Tokens>& candidates, const Tokens& gold);

/// Sentence BLEU-4 in [0, 100]. Unigram precision is unsmoothed; a zero
/// higher-order match count uses (0 + 1) / (total + 1). Orders longer than
/// the candidate are left out of the geometric mean. Brevity penalty
/// exp(1 - r/c) when c <= r. Empty candidate scores 0.
double bleu4(const Tokens& candidate, const Tokens& reference);

/// Token-level Levenshtein distance with unit costs.
std::size_t edit_distance(const Tokens& a, const Tokens& b);

class UnknownAssertType : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Assert name of a gold statement, qualification stripped.
std::string classify_assert(const Tokens& gold);

struct OverlapReport {
  std::vector<std::string> pp_raw;       // sorted
  std::vector<std::string> pp_abstract;  // sorted
  std::size_t intersection_count = 0;
  std::size_t raw_only_count = 0;
  std::size_t abstract_only_count = 0;
  std::size_t union_count = 0;
  double intersection_frac = 0.0;
  double raw_only_frac = 0.0;
  double abstract_only_frac = 0.0;
  bool empty_union = false;
  std::size_t excluded_ids = 0;  // ids present in only one test set
};

OverlapReport overlap_metrics(const std::set<std::string>& pp_raw, const std::set<std::string>& pp_abstract);

/// The k most frequent training targets, count descending then
/// lexicographic by token sequence.
std::vector<Tokens> most_frequent_targets(const std::vector<Tokens>& train_targets, std::size_t k);

/// Number of test targets equal to one of the k most frequent training
/// targets.
std::size_t frequency_baseline(const std::vector<Tokens>& train_targets, const std::vector<Tokens>& test_targets,
                               std::size_t k);

/// Perfect predictions whose gold target holds a token outside `vocab`.
std::size_t copy_attribution(const std::set<std::string>& perfect_ids, const std::vector<miner::TapRecord>& taps,
                             const Vocabulary& vocab);

struct ScoredPair {
  std::string id;
  Tokens prediction;
  Tokens gold;
  double bleu = 0.0;
};

struct BucketSample {
  static constexpr std::array<double, 5> kEdges = {0.0, 25.0, 50.0, 75.0, 100.0};
  std::array<std::vector<ScoredPair>, 4> buckets;
  std::vector<std::string> warnings;
};

/// Splits imperfect predictions into BLEU ranges [0,25) [25,50) [50,75)
/// [75,100) and draws up to n per range. Items scoring 100 are skipped.
BucketSample bleu_bucket_sample(const std::vector<ScoredPair>& imperfect, std::size_t n_per_bucket,
                                std::uint64_t seed);

struct TimingReport {
  std::map<std::size_t, double> seconds_per_input;
  double repeat_noise = 0.0;  // relative gap between two beam-1 passes
  bool monotone = true;
  std::vector<std::string> warnings;
};

/// Times `decode(k, i)` over every input i for each beam size. Only the decode
/// callback is inside the clock.
TimingReport timing_harness(std::size_t input_count, const std::vector<std::size_t>& beam_sizes,
                            const std::function<void(std::size_t k, std::size_t i)>& decode);

std::vector<std::size_t> default_beam_sizes();

struct PredictionRecord {
  std::string id;
  std::size_t k = 0;
  std::vector<Tokens> candidates;
  std::vector<double> log_probs;

  bool operator==(const PredictionRecord&) const = default;
};

struct BeamStats {
  std::size_t k = 0;
  std::size_t evaluated = 0;
  std::size_t perfect_count = 0;
  double perfect_rate = 0.0;
  double mean_bleu4 = 0.0;
};

struct TaxonomyCell {
  std::size_t perfect = 0;
  std::size_t dataset = 0;
};

struct EvalReport {
  std::vector<BeamStats> per_beam;
  std::size_t reference_beam = 0;  // beam used for histogram/taxonomy/copy
  std::map<std::size_t, std::size_t> edit_distance_histogram;
  std::map<std::string, TaxonomyCell> taxonomy;
  std::size_t unknown_assert_count = 0;
  std::size_t missing_gold = 0;
  std::optional<std::size_t> copy_attributed;
  std::optional<TimingReport> timing;
};

/// The candidate that counts for a prediction: the gold-equal one when
/// present, else the top-ranked one. Empty when there are no candidates.
Tokens chosen_candidate(const PredictionRecord& p, const Tokens& gold);

/// Aggregates predictions (possibly several beam sizes per id) against gold
/// targets keyed by id. Histogram, taxonomy and copy attribution use the
/// smallest beam size present.
EvalReport evaluate(const std::vector<PredictionRecord>& predictions, const std::map<std::string, Tokens>& gold,
                    const Vocabulary* copy_vocab = nullptr, const std::vector<miner::TapRecord>* raw_taps = nullptr);

std::string eval_report_json(const EvalReport& report);
std::string overlap_report_json(const OverlapReport& report);
std::string histogram_csv(const std::map<std::size_t, std::size_t>& histogram);

std::string predictions_to_jsonl(const std::vector<PredictionRecord>& predictions);
std::vector<PredictionRecord> predictions_from_jsonl(std::string_view text);

}  // namespace assertgen::evalkit
