#include "assertgen/evalkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "assertgen/errors.hpp"
#include "assertgen/tapio.hpp"
#include "assertgen/util.hpp"
#include "json.hpp"

namespace assertgen::evalkit {

using nlohmann::ordered_json;

bool perfect_prediction(const std::vector<Tokens>& candidates, const Tokens& gold) {
  return std::any_of(candidates.begin(), candidates.end(), [&](const Tokens& c) { return c == gold; });
}

namespace {

std::map<std::vector<std::string_view>, std::size_t> ngram_counts(const Tokens& seq, std::size_t n) {
  std::map<std::vector<std::string_view>, std::size_t> counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    std::vector<std::string_view> gram(seq.begin() + static_cast<std::ptrdiff_t>(i),
                                       seq.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[gram];
  }
  return counts;
}

}  // namespace

double bleu4(const Tokens& candidate, const Tokens& reference) {
  const std::size_t c = candidate.size();
  const std::size_t r = reference.size();
  if (c == 0) return 0.0;
  const std::size_t orders = std::min<std::size_t>(4, c);
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= orders; ++n) {
    auto cand = ngram_counts(candidate, n);
    auto ref = ngram_counts(reference, n);
    std::size_t matched = 0;
    for (const auto& [gram, count] : cand) {
      auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    const double total = static_cast<double>(c - n + 1);
    double p;
    if (matched > 0) {
      p = static_cast<double>(matched) / total;
    } else if (n == 1) {
      return 0.0;
    } else {
      p = 1.0 / (total + 1.0);
    }
    log_sum += std::log(p);
  }
  const double bp = c > r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return 100.0 * bp * std::exp(log_sum / static_cast<double>(orders));
}

std::size_t edit_distance(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string classify_assert(const Tokens& gold) {
  std::size_t i = 0;
  while (i + 2 < gold.size() && gold[i + 1] == ".") i += 2;
  if (i < gold.size()) {
    const auto& names = miner::assert_names();
    if (std::find(names.begin(), names.end(), gold[i]) != names.end() &&
        (i + 1 >= gold.size() || gold[i + 1] == "(")) {
      return gold[i];
    }
  }
  throw UnknownAssertType("not a JUnit 4 assert: " + join_tokens(gold));
}

OverlapReport overlap_metrics(const std::set<std::string>& pp_raw, const std::set<std::string>& pp_abstract) {
  OverlapReport r;
  r.pp_raw.assign(pp_raw.begin(), pp_raw.end());
  r.pp_abstract.assign(pp_abstract.begin(), pp_abstract.end());
  for (const auto& id : pp_raw) {
    if (pp_abstract.count(id)) {
      ++r.intersection_count;
    } else {
      ++r.raw_only_count;
    }
  }
  r.abstract_only_count = pp_abstract.size() - r.intersection_count;
  r.union_count = r.intersection_count + r.raw_only_count + r.abstract_only_count;
  if (r.union_count == 0) {
    r.empty_union = true;
    return r;
  }
  const double u = static_cast<double>(r.union_count);
  r.intersection_frac = static_cast<double>(r.intersection_count) / u;
  r.raw_only_frac = static_cast<double>(r.raw_only_count) / u;
  r.abstract_only_frac = static_cast<double>(r.abstract_only_count) / u;
  return r;
}

std::vector<Tokens> most_frequent_targets(const std::vector<Tokens>& train_targets, std::size_t k) {
  std::map<Tokens, std::size_t> counts;
  for (const auto& t : train_targets) ++counts[t];
  std::vector<std::pair<const Tokens*, std::size_t>> ranked;
  ranked.reserve(counts.size());
  for (const auto& [t, n] : counts) ranked.emplace_back(&t, n);
  // counts is already in lexicographic order, so a stable sort by count keeps
  // lexicographic order among ties.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<Tokens> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(*ranked[i].first);
  return out;
}

std::size_t frequency_baseline(const std::vector<Tokens>& train_targets, const std::vector<Tokens>& test_targets,
                               std::size_t k) {
  auto top = most_frequent_targets(train_targets, k);
  std::set<Tokens> top_set(top.begin(), top.end());
  return static_cast<std::size_t>(
      std::count_if(test_targets.begin(), test_targets.end(), [&](const Tokens& t) { return top_set.count(t) > 0; }));
}

std::size_t copy_attribution(const std::set<std::string>& perfect_ids, const std::vector<miner::TapRecord>& taps,
                             const Vocabulary& vocab) {
  std::size_t n = 0;
  for (const auto& tap : taps) {
    if (!perfect_ids.count(tap.id)) continue;
    const bool needs_copy = std::any_of(tap.target_tokens.begin(), tap.target_tokens.end(),
                                        [&](const std::string& t) { return !vocab.contains(t); });
    if (needs_copy) ++n;
  }
  return n;
}

BucketSample bleu_bucket_sample(const std::vector<ScoredPair>& imperfect, std::size_t n_per_bucket,
                                std::uint64_t seed) {
  BucketSample out;
  std::array<std::vector<std::size_t>, 4> members;
  for (std::size_t i = 0; i < imperfect.size(); ++i) {
    const double b = imperfect[i].bleu;
    if (!(b >= 0.0) || b >= 100.0) continue;
    const auto bucket = std::min<std::size_t>(3, static_cast<std::size_t>(b / 25.0));
    members[bucket].push_back(i);
  }
  for (std::size_t bucket = 0; bucket < 4; ++bucket) {
    auto& idx = members[bucket];
    if (idx.size() > n_per_bucket) {
      Rng rng(seed + bucket);
      rng.shuffle(idx);
      idx.resize(n_per_bucket);
      std::sort(idx.begin(), idx.end());
    } else if (idx.size() < n_per_bucket) {
      out.warnings.push_back("BLEU bucket [" + std::to_string(static_cast<int>(BucketSample::kEdges[bucket])) + "," +
                             std::to_string(static_cast<int>(BucketSample::kEdges[bucket + 1])) + ") has only " +
                             std::to_string(idx.size()) + " of " + std::to_string(n_per_bucket) + " items");
    }
    for (std::size_t i : idx) out.buckets[bucket].push_back(imperfect[i]);
  }
  return out;
}

std::vector<std::size_t> default_beam_sizes() {
  std::vector<std::size_t> out{1};
  for (std::size_t k = 5; k <= 50; k += 5) out.push_back(k);
  return out;
}

TimingReport timing_harness(std::size_t input_count, const std::vector<std::size_t>& beam_sizes,
                            const std::function<void(std::size_t, std::size_t)>& decode) {
  TimingReport report;
  if (input_count == 0) {
    report.warnings.push_back("no inputs to time");
    return report;
  }
  auto pass = [&](std::size_t k) {
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < input_count; ++i) decode(k, i);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s / static_cast<double>(input_count);
  };
  const double first = pass(1);
  const double second = pass(1);
  report.repeat_noise = std::abs(first - second) / std::max({first, second, 1e-12});
  for (std::size_t k : beam_sizes) report.seconds_per_input[k] = (k == 1) ? std::min(first, second) : pass(k);

  double prev = -1.0;
  std::size_t prev_k = 0;
  for (const auto& [k, s] : report.seconds_per_input) {
    if (prev >= 0.0 && s < prev) {
      report.monotone = false;
      char buf[160];
      std::snprintf(buf, sizeof buf, "timing not monotone: k=%zu took %.6gs/input, below k=%zu at %.6gs/input", k, s,
                    prev_k, prev);
      report.warnings.emplace_back(buf);
    }
    prev = s;
    prev_k = k;
  }
  return report;
}

Tokens chosen_candidate(const PredictionRecord& p, const Tokens& gold) {
  for (const auto& c : p.candidates) {
    if (c == gold) return c;
  }
  return p.candidates.empty() ? Tokens{} : p.candidates.front();
}

EvalReport evaluate(const std::vector<PredictionRecord>& predictions, const std::map<std::string, Tokens>& gold,
                    const Vocabulary* copy_vocab, const std::vector<miner::TapRecord>* raw_taps) {
  EvalReport report;
  std::map<std::size_t, std::vector<const PredictionRecord*>> by_k;
  for (const auto& p : predictions) {
    if (!gold.count(p.id)) {
      ++report.missing_gold;
      continue;
    }
    by_k[p.k].push_back(&p);
  }
  for (const auto& [k, preds] : by_k) {
    BeamStats s;
    s.k = k;
    s.evaluated = preds.size();
    double bleu_sum = 0.0;
    for (const auto* p : preds) {
      const auto& g = gold.at(p->id);
      if (perfect_prediction(p->candidates, g)) ++s.perfect_count;
      bleu_sum += bleu4(chosen_candidate(*p, g), g);
    }
    if (s.evaluated > 0) {
      s.perfect_rate = static_cast<double>(s.perfect_count) / static_cast<double>(s.evaluated);
      s.mean_bleu4 = bleu_sum / static_cast<double>(s.evaluated);
    }
    report.per_beam.push_back(s);
  }
  if (by_k.empty()) return report;

  report.reference_beam = by_k.begin()->first;
  std::set<std::string> perfect_ids;
  for (const auto* p : by_k.begin()->second) {
    const auto& g = gold.at(p->id);
    const bool perfect = perfect_prediction(p->candidates, g);
    if (perfect) {
      perfect_ids.insert(p->id);
    } else {
      ++report.edit_distance_histogram[edit_distance(chosen_candidate(*p, g), g)];
    }
    try {
      auto& cell = report.taxonomy[classify_assert(g)];
      ++cell.dataset;
      if (perfect) ++cell.perfect;
    } catch (const UnknownAssertType&) {
      ++report.unknown_assert_count;
    }
  }
  if (copy_vocab && raw_taps) report.copy_attributed = copy_attribution(perfect_ids, *raw_taps, *copy_vocab);
  return report;
}

std::string eval_report_json(const EvalReport& r) {
  ordered_json j;
  ordered_json beams = ordered_json::array();
  for (const auto& s : r.per_beam) {
    beams.push_back({{"k", s.k},
                     {"evaluated", s.evaluated},
                     {"perfect_count", s.perfect_count},
                     {"perfect_rate", s.perfect_rate},
                     {"mean_bleu4", s.mean_bleu4}});
  }
  j["per_beam"] = beams;
  j["reference_beam"] = r.reference_beam;
  ordered_json hist = ordered_json::object();
  for (const auto& [d, n] : r.edit_distance_histogram) hist[std::to_string(d)] = n;
  j["edit_distance_histogram"] = hist;
  ordered_json tax = ordered_json::object();
  for (const auto& [name, cell] : r.taxonomy) tax[name] = {{"perfect", cell.perfect}, {"dataset", cell.dataset}};
  j["taxonomy"] = tax;
  j["unknown_assert_count"] = r.unknown_assert_count;
  j["missing_gold"] = r.missing_gold;
  j["copy_attributed"] = r.copy_attributed ? ordered_json(*r.copy_attributed) : ordered_json(nullptr);
  if (r.timing) {
    ordered_json t = ordered_json::object();
    for (const auto& [k, s] : r.timing->seconds_per_input) t[std::to_string(k)] = s;
    j["timing"] = {{"seconds_per_input", t},
                   {"repeat_noise", r.timing->repeat_noise},
                   {"monotone", r.timing->monotone},
                   {"warnings", r.timing->warnings}};
  } else {
    j["timing"] = nullptr;
  }
  return j.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

std::string overlap_report_json(const OverlapReport& r) {
  ordered_json j;
  j["pp_raw"] = r.pp_raw;
  j["pp_abstract"] = r.pp_abstract;
  j["intersection_count"] = r.intersection_count;
  j["raw_only_count"] = r.raw_only_count;
  j["abstract_only_count"] = r.abstract_only_count;
  j["union_count"] = r.union_count;
  j["intersection_frac"] = r.intersection_frac;
  j["raw_only_frac"] = r.raw_only_frac;
  j["abstract_only_frac"] = r.abstract_only_frac;
  j["empty_union"] = r.empty_union;
  j["excluded_ids"] = r.excluded_ids;
  return j.dump(2) + "\n";
}

std::string histogram_csv(const std::map<std::size_t, std::size_t>& histogram) {
  std::string out = "distance,count\n";
  for (const auto& [d, n] : histogram) out += std::to_string(d) + "," + std::to_string(n) + "\n";
  return out;
}

std::string predictions_to_jsonl(const std::vector<PredictionRecord>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    ordered_json j;
    j["id"] = p.id;
    j["k"] = p.k;
    ordered_json cands = ordered_json::array();
    for (const auto& c : p.candidates) cands.push_back(join_tokens(c));
    j["candidates"] = cands;
    j["log_probs"] = p.log_probs;
    out += j.dump(-1, ' ', false, ordered_json::error_handler_t::replace) + "\n";
  }
  return out;
}

std::vector<PredictionRecord> predictions_from_jsonl(std::string_view text) {
  std::vector<PredictionRecord> out;
  std::size_t line_no = 0;
  for (auto line : tapio::jsonl_lines(text)) {
    ++line_no;
    try {
      auto j = ordered_json::parse(line);
      PredictionRecord p;
      p.id = j.at("id").get<std::string>();
      p.k = j.at("k").get<std::size_t>();
      for (const auto& c : j.at("candidates")) p.candidates.push_back(jlex::split_lexemes(c.get<std::string>()));
      p.log_probs = j.value("log_probs", std::vector<double>{});
      out.push_back(std::move(p));
    } catch (const ordered_json::exception& e) {
      throw InputError("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace assertgen::evalkit
