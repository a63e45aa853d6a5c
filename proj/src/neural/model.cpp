#include "assertgen/neural/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "assertgen/errors.hpp"

namespace assertgen::neural {

ModelVocab::ModelVocab() : tokens_{"</s>", "<s>", "<pad>", "<unk>"} {
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

ModelVocab::ModelVocab(const std::vector<std::string>& lexemes) : ModelVocab() {
  for (const auto& l : lexemes) {
    if (index_.contains(l)) continue;
    index_.emplace(l, tokens_.size());
    tokens_.push_back(l);
  }
}

std::optional<std::size_t> ModelVocab::find(const std::string& lexeme) const {
  auto it = index_.find(lexeme);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Seq2SeqParams Seq2SeqParams::init(const Hyperparams& hp, std::uint64_t seed, double scale) {
  if (hp.vocab_size <= kReservedIds) throw std::invalid_argument("vocabulary too small");
  const std::size_t V = hp.vocab_size;
  const std::size_t d = hp.embed_dim;
  const std::size_t h = hp.hidden;
  const std::size_t H = hp.decoder_hidden();

  Seq2SeqParams p;
  p.hp = hp;
  p.embedding = Tensor({V, d});
  p.enc_fwd_w = Tensor({4 * h, d + h});
  p.enc_fwd_b = Tensor({4 * h});
  p.enc_bwd_w = Tensor({4 * h, d + h});
  p.enc_bwd_b = Tensor({4 * h});
  p.bridge_h_w = Tensor({H, 2 * h});
  p.bridge_h_b = Tensor({H});
  p.bridge_c_w = Tensor({H, 2 * h});
  p.bridge_c_b = Tensor({H});
  p.dec1_w = Tensor({4 * H, d + 2 * h + H});
  p.dec1_b = Tensor({4 * H});
  p.dec2_w = Tensor({4 * H, 2 * H});
  p.dec2_b = Tensor({4 * H});
  if (hp.attention == AttentionKind::Additive) {
    p.att_query_w = Tensor({H, H});
    p.att_key_w = Tensor({H, 2 * h});
    p.att_b = Tensor({H});
    p.att_v = Tensor({H});
  }
  p.out_w = Tensor({V, H + 2 * h});
  p.out_b = Tensor({V});
  if (hp.copy_enabled) {
    p.gate_w = Tensor({H + 2 * h + d});
    p.gate_b = Tensor({1});
  }
  Rng rng(seed);
  for (auto& [name, t] : p.named()) {
    for (double& v : t->values) v = rng.uniform(-scale, scale);
  }
  return p;
}

std::vector<std::pair<std::string, const Tensor*>> Seq2SeqParams::named() const {
  std::vector<std::pair<std::string, const Tensor*>> all = {
      {"embedding", &embedding},     {"enc_fwd_w", &enc_fwd_w},   {"enc_fwd_b", &enc_fwd_b},
      {"enc_bwd_w", &enc_bwd_w},     {"enc_bwd_b", &enc_bwd_b},   {"bridge_h_w", &bridge_h_w},
      {"bridge_h_b", &bridge_h_b},   {"bridge_c_w", &bridge_c_w}, {"bridge_c_b", &bridge_c_b},
      {"dec1_w", &dec1_w},           {"dec1_b", &dec1_b},         {"dec2_w", &dec2_w},
      {"dec2_b", &dec2_b},           {"att_query_w", &att_query_w}, {"att_key_w", &att_key_w},
      {"att_b", &att_b},             {"att_v", &att_v},           {"out_w", &out_w},
      {"out_b", &out_b},             {"gate_w", &gate_w},         {"gate_b", &gate_b},
  };
  std::erase_if(all, [](const auto& e) { return e.second->shape.empty(); });
  return all;
}

std::vector<std::pair<std::string, Tensor*>> Seq2SeqParams::named() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (auto& [name, t] : std::as_const(*this).named()) out.emplace_back(name, const_cast<Tensor*>(t));
  return out;
}

void Seq2SeqParams::zero_grad() {
  for (auto& [name, t] : named()) t->zero_grad();
}

std::size_t Seq2SeqParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : named()) n += t->size();
  return n;
}

EncodedInput encode_input(const ModelVocab& vocab, const std::vector<std::string>& lexemes) {
  EncodedInput in;
  in.ids.reserve(lexemes.size());
  in.ext_ids.reserve(lexemes.size());
  for (const auto& l : lexemes) {
    if (auto id = vocab.find(l)) {
      in.ids.push_back(*id);
      in.ext_ids.push_back(*id);
      continue;
    }
    in.ids.push_back(kUnkId);
    auto it = std::find(in.oov.begin(), in.oov.end(), l);
    std::size_t k = static_cast<std::size_t>(it - in.oov.begin());
    if (it == in.oov.end()) in.oov.push_back(l);
    in.ext_ids.push_back(vocab.size() + k);
  }
  return in;
}

std::vector<std::size_t> encode_target(const ModelVocab& vocab, const EncodedInput& input,
                                       const std::vector<std::string>& lexemes, bool copy_enabled) {
  std::vector<std::size_t> out;
  out.reserve(lexemes.size() + 1);
  for (const auto& l : lexemes) {
    if (auto id = vocab.find(l)) {
      out.push_back(*id);
      continue;
    }
    auto it = std::find(input.oov.begin(), input.oov.end(), l);
    if (copy_enabled && it != input.oov.end()) {
      out.push_back(vocab.size() + static_cast<std::size_t>(it - input.oov.begin()));
    } else {
      out.push_back(kUnkId);
    }
  }
  out.push_back(kStopId);
  return out;
}

std::size_t Seq2Seq::output_size(const EncodedInput& input) const {
  return hp().vocab_size + (hp().copy_enabled ? input.oov.size() : 0);
}

LstmState Seq2Seq::lstm_cell(Tape& tape, Tensor& w, Tensor& b, Var input, const LstmState& prev,
                             std::size_t hidden) {
  const Var parts[] = {input, prev.h};
  Var gates = tape.affine(tape.param(w), tape.concat(parts), tape.param(b));
  Var in_gate = tape.sigmoid(tape.slice(gates, 0, hidden));
  Var forget = tape.sigmoid(tape.slice(gates, hidden, hidden));
  Var cand = tape.tanh(tape.slice(gates, 2 * hidden, hidden));
  Var out_gate = tape.sigmoid(tape.slice(gates, 3 * hidden, hidden));
  Var c = tape.add(tape.mul(forget, prev.c), tape.mul(in_gate, cand));
  Var h = tape.mul(out_gate, tape.tanh(c));
  return {h, c};
}

Encoded Seq2Seq::encode(Tape& tape, std::span<const std::size_t> ids, Mode mode, Rng* rng) {
  const std::size_t n = ids.size();
  if (n == 0) throw std::invalid_argument("encode: empty input");
  auto& p = params_;
  const std::size_t h = p.hp.hidden;

  std::vector<Var> emb(n);
  for (std::size_t i = 0; i < n; ++i) emb[i] = tape.embed(p.embedding, ids[i]);

  std::vector<Var> fwd(n);
  std::vector<Var> bwd(n);
  LstmState s{tape.zeros(h), tape.zeros(h)};
  for (std::size_t i = 0; i < n; ++i) {
    s = lstm_cell(tape, p.enc_fwd_w, p.enc_fwd_b, emb[i], s, h);
    fwd[i] = s.h;
  }
  s = LstmState{tape.zeros(h), tape.zeros(h)};
  for (std::size_t i = n; i-- > 0;) {
    s = lstm_cell(tape, p.enc_bwd_w, p.enc_bwd_b, emb[i], s, h);
    bwd[i] = s.h;
  }

  Encoded enc;
  enc.states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Var pair[] = {fwd[i], bwd[i]};
    Var st = tape.concat(pair);
    if (mode == Mode::Train && rng) st = tape.dropout(st, p.hp.dropout, *rng);
    enc.states[i] = st;
  }
  const Var ends[] = {fwd[n - 1], bwd[0]};
  Var summary = tape.concat(ends);
  enc.final_state.h =
      tape.tanh(tape.affine(tape.param(p.bridge_h_w), summary, tape.param(p.bridge_h_b)));
  enc.final_state.c = tape.affine(tape.param(p.bridge_c_w), summary, tape.param(p.bridge_c_b));

  if (p.hp.attention == AttentionKind::Additive) {
    Var key_w = tape.param(p.att_key_w);
    enc.keys.reserve(n);
    for (Var st : enc.states) enc.keys.push_back(tape.matvec(key_w, st));
  }
  return enc;
}

AttentionResult Seq2Seq::attend(Tape& tape, const Encoded& enc, Var query) {
  auto& p = params_;
  std::vector<Var> scores;
  scores.reserve(enc.states.size());
  if (p.hp.attention == AttentionKind::Additive) {
    Var q = tape.affine(tape.param(p.att_query_w), query, tape.param(p.att_b));
    Var v = tape.param(p.att_v);
    for (Var key : enc.keys) scores.push_back(tape.dot(v, tape.tanh(tape.add(q, key))));
  } else {
    for (Var st : enc.states) scores.push_back(tape.dot(query, st));
  }
  Var alpha = tape.softmax(tape.concat(scores));
  return {tape.weighted_sum(enc.states, alpha), alpha};
}

DecoderState Seq2Seq::initial_state(const Encoded& enc) const {
  return DecoderState{enc.final_state, enc.final_state};
}

StepResult Seq2Seq::decode_step(Tape& tape, std::size_t prev_token, const DecoderState& state,
                                const Encoded& enc, const EncodedInput& input, Mode mode, Rng* rng,
                                std::optional<double> force_p_gen) {
  auto& p = params_;
  const std::size_t V = p.hp.vocab_size;
  const std::size_t H = p.hp.decoder_hidden();
  const bool train = mode == Mode::Train && rng;

  Var emb = tape.embed(p.embedding, prev_token < V ? prev_token : kUnkId);
  AttentionResult att = attend(tape, enc, state.layer2.h);

  const Var in1[] = {emb, att.context};
  LstmState l1 = lstm_cell(tape, p.dec1_w, p.dec1_b, tape.concat(in1), state.layer1, H);
  Var l1_out = train ? tape.dropout(l1.h, p.hp.dropout, *rng) : l1.h;
  LstmState l2 = lstm_cell(tape, p.dec2_w, p.dec2_b, l1_out, state.layer2, H);
  Var top = train ? tape.dropout(l2.h, p.hp.dropout, *rng) : l2.h;

  const Var feat_parts[] = {top, att.context};
  Var feat = tape.concat(feat_parts);
  Var p_vocab = tape.softmax(tape.affine(tape.param(p.out_w), feat, tape.param(p.out_b)));

  StepResult r;
  r.alpha = att.alpha;
  r.p_vocab = p_vocab;
  r.state = DecoderState{l1, l2};
  if (!p.hp.copy_enabled) {
    r.dist = p_vocab;
    return r;
  }
  if (force_p_gen) {
    r.p_gen = tape.constant({*force_p_gen});
  } else {
    const Var gate_in[] = {feat, emb};
    Var logit = tape.add(tape.dot(tape.param(p.gate_w), tape.concat(gate_in)), tape.param(p.gate_b));
    r.p_gen = tape.sigmoid(logit);
  }
  r.dist = tape.copy_mix(p_vocab, att.alpha, r.p_gen, input.ext_ids, output_size(input));
  return r;
}

Var Seq2Seq::loss(Tape& tape, const Example& example, Mode mode, Rng* rng) {
  if (example.target.empty()) throw std::invalid_argument("loss: empty target");
  Encoded enc = encode(tape, example.input.ids, mode, rng);
  DecoderState state = initial_state(enc);
  std::size_t prev = kStartId;
  std::vector<Var> terms;
  terms.reserve(example.target.size());
  for (std::size_t y : example.target) {
    StepResult step = decode_step(tape, prev, state, enc, example.input, mode, rng);
    terms.push_back(tape.neg_log(step.dist, y));
    state = step.state;
    prev = y;
  }
  return tape.mean(terms);
}

double Seq2Seq::evaluate_loss(const Example& example) {
  Tape tape(false);
  double v = tape.scalar(loss(tape, example, Mode::Infer, nullptr));
  if (!std::isfinite(v)) throw NumericalError("non-finite validation loss");
  return v;
}

}  // namespace assertgen::neural
