#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "assertgen/neural/beam.hpp"
#include "assertgen/neural/model.hpp"

namespace assertgen::neural {

/// Step-model adapter over a trained Seq2Seq for one input. Start, pad and
/// unknown ids are never proposed.
class Seq2SeqDecoder {
 public:
  using State = DecoderState;

  Seq2SeqDecoder(Seq2Seq& model, const EncodedInput& input);

  State initial_state();
  std::pair<std::vector<double>, State> step(const State& state, std::size_t prev);

 private:
  Seq2Seq& model_;
  const EncodedInput& input_;
  Tape tape_{false};
  Encoded enc_;
};

struct Candidate {
  std::vector<std::string> tokens;  // stop symbol removed
  double log_prob = 0.0;
  bool finished = false;
};

/// Beam search for one context. Extended ids resolve to the copied lexeme.
std::vector<Candidate> predict(Seq2Seq& model, const ModelVocab& vocab,
                               const std::vector<std::string>& context, std::size_t k,
                               std::size_t max_len = 64);

std::vector<std::string> ids_to_lexemes(const ModelVocab& vocab, const EncodedInput& input,
                                        const std::vector<std::size_t>& ids);

}  // namespace assertgen::neural
