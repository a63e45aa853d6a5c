#pragma once

// Length-bounded beam search over any step model.
//
// A step model exposes
//   State initial_state();
//   std::pair<std::vector<double>, State> step(const State&, std::size_t prev);
// where the vector holds log-probabilities over output ids (-inf excludes an
// id). The first step is fed `start_id`.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace assertgen::neural {

struct BeamHypothesis {
  std::vector<std::size_t> tokens;
  double log_prob = 0.0;
  bool finished = false;

  bool operator==(const BeamHypothesis&) const = default;
};

template <typename M>
concept StepModel = requires(M& m, const typename M::State& s, std::size_t tok) {
  { m.initial_state() } -> std::convertible_to<typename M::State>;
  { m.step(s, tok) } -> std::convertible_to<std::pair<std::vector<double>, typename M::State>>;
};

/// Keeps the k best partial hypotheses per step. Finished hypotheses stay in
/// the beam unchanged; equal scores keep earlier hypotheses (then lower token
/// ids) first. Returns at most k hypotheses, best first.
template <StepModel M>
std::vector<BeamHypothesis> beam_search(M& model, std::size_t k, std::size_t max_len,
                                        std::size_t start_id, std::size_t stop_id) {
  using State = typename M::State;
  struct Live {
    BeamHypothesis hyp;
    State state;
  };
  struct Candidate {
    double log_prob;
    std::size_t parent;
    std::size_t token;  // meaningless when carried
    bool carried;
  };
  if (k == 0 || max_len == 0) return {};

  std::vector<Live> beams;
  beams.push_back(Live{BeamHypothesis{}, model.initial_state()});
  for (std::size_t t = 0; t < max_len; ++t) {
    bool all_done = std::all_of(beams.begin(), beams.end(), [](const Live& l) { return l.hyp.finished; });
    if (all_done) break;

    std::vector<Candidate> candidates;
    std::vector<std::optional<State>> next_states(beams.size());
    for (std::size_t b = 0; b < beams.size(); ++b) {
      const Live& live = beams[b];
      if (live.hyp.finished) {
        candidates.push_back(Candidate{live.hyp.log_prob, b, 0, true});
        continue;
      }
      std::size_t prev = live.hyp.tokens.empty() ? start_id : live.hyp.tokens.back();
      auto [log_probs, state] = model.step(live.state, prev);
      next_states[b].emplace(std::move(state));
      for (std::size_t w = 0; w < log_probs.size(); ++w) {
        if (std::isfinite(log_probs[w])) {
          candidates.push_back(Candidate{live.hyp.log_prob + log_probs[w], b, w, false});
        }
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.log_prob > b.log_prob; });
    if (candidates.size() > k) candidates.resize(k);

    std::vector<Live> next;
    next.reserve(candidates.size());
    for (const Candidate& c : candidates) {
      if (c.carried) {
        next.push_back(beams[c.parent]);
        continue;
      }
      Live l{beams[c.parent].hyp, *next_states[c.parent]};
      l.hyp.tokens.push_back(c.token);
      l.hyp.log_prob = c.log_prob;
      l.hyp.finished = c.token == stop_id;
      next.push_back(std::move(l));
    }
    beams = std::move(next);
  }

  std::vector<BeamHypothesis> out;
  out.reserve(beams.size());
  for (auto& l : beams) {
    if (!l.hyp.tokens.empty()) out.push_back(std::move(l.hyp));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const BeamHypothesis& a, const BeamHypothesis& b) { return a.log_prob > b.log_prob; });
  return out;
}

/// Argmax decoding (lowest id wins ties).
template <StepModel M>
BeamHypothesis greedy_decode(M& model, std::size_t max_len, std::size_t start_id, std::size_t stop_id) {
  BeamHypothesis hyp;
  auto state = model.initial_state();
  std::size_t prev = start_id;
  for (std::size_t t = 0; t < max_len; ++t) {
    auto [log_probs, next] = model.step(state, prev);
    std::size_t best = log_probs.size();
    for (std::size_t w = 0; w < log_probs.size(); ++w) {
      if (!std::isfinite(log_probs[w])) continue;
      if (best == log_probs.size() || log_probs[w] > log_probs[best]) best = w;
    }
    if (best == log_probs.size()) break;
    hyp.tokens.push_back(best);
    hyp.log_prob += log_probs[best];
    state = std::move(next);
    prev = best;
    if (best == stop_id) {
      hyp.finished = true;
      break;
    }
  }
  return hyp;
}

}  // namespace assertgen::neural
