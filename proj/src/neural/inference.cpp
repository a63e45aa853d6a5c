#include "assertgen/neural/inference.hpp"

#include <cmath>
#include <limits>

#include "assertgen/errors.hpp"

namespace assertgen::neural {

Seq2SeqDecoder::Seq2SeqDecoder(Seq2Seq& model, const EncodedInput& input)
    : model_(model), input_(input) {
  enc_ = model_.encode(tape_, input_.ids, Mode::Infer, nullptr);
}

Seq2SeqDecoder::State Seq2SeqDecoder::initial_state() { return model_.initial_state(enc_); }

std::pair<std::vector<double>, Seq2SeqDecoder::State> Seq2SeqDecoder::step(const State& state,
                                                                           std::size_t prev) {
  StepResult r = model_.decode_step(tape_, prev, state, enc_, input_, Mode::Infer, nullptr);
  auto dist = tape_.value(r.dist);
  std::vector<double> log_probs(dist.size());
  for (std::size_t w = 0; w < dist.size(); ++w) {
    if (std::isnan(dist[w])) throw NumericalError("NaN in output distribution");
    log_probs[w] = std::log(dist[w]);
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  log_probs[kStartId] = kNegInf;
  log_probs[kPadId] = kNegInf;
  log_probs[kUnkId] = kNegInf;
  return {std::move(log_probs), r.state};
}

std::vector<std::string> ids_to_lexemes(const ModelVocab& vocab, const EncodedInput& input,
                                        const std::vector<std::size_t>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) {
    if (id == kStopId) break;
    if (id < vocab.size()) {
      out.push_back(vocab.lexeme(id));
    } else {
      out.push_back(input.oov.at(id - vocab.size()));
    }
  }
  return out;
}

std::vector<Candidate> predict(Seq2Seq& model, const ModelVocab& vocab,
                               const std::vector<std::string>& context, std::size_t k,
                               std::size_t max_len) {
  EncodedInput input = encode_input(vocab, context);
  if (input.ids.empty()) return {};
  Seq2SeqDecoder decoder(model, input);
  auto beams = beam_search(decoder, k, max_len, kStartId, kStopId);
  std::vector<Candidate> out;
  out.reserve(beams.size());
  for (const auto& b : beams) {
    out.push_back(Candidate{ids_to_lexemes(vocab, input, b.tokens), b.log_prob, b.finished});
  }
  return out;
}

}  // namespace assertgen::neural
