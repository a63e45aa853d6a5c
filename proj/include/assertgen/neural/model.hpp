#pragma once

// Bidirectional-LSTM encoder, attention, two-layer LSTM decoder and an
// optional pointer-generator copy gate.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "assertgen/neural/tape.hpp"

namespace assertgen::neural {

inline constexpr std::size_t kStopId = 0;
inline constexpr std::size_t kStartId = 1;
inline constexpr std::size_t kPadId = 2;
inline constexpr std::size_t kUnkId = 3;
inline constexpr std::size_t kReservedIds = 4;

/// Output/input token table of a model. Ids 0-3 are reserved.
class ModelVocab {
 public:
  ModelVocab();
  /// Appends lexemes in order, skipping duplicates and reserved spellings.
  explicit ModelVocab(const std::vector<std::string>& lexemes);

  std::size_t size() const { return tokens_.size(); }
  std::optional<std::size_t> find(const std::string& lexeme) const;
  const std::string& lexeme(std::size_t id) const { return tokens_[id]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class AttentionKind { Additive, Dot };

struct Hyperparams {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 128;
  std::size_t hidden = 256;  // per encoder direction; decoder uses 2x
  bool copy_enabled = false;
  AttentionKind attention = AttentionKind::Additive;
  double dropout = 0.2;

  std::size_t decoder_hidden() const { return 2 * hidden; }
};

struct Seq2SeqParams {
  Hyperparams hp;
  Tensor embedding;
  Tensor enc_fwd_w, enc_fwd_b;
  Tensor enc_bwd_w, enc_bwd_b;
  Tensor bridge_h_w, bridge_h_b;
  Tensor bridge_c_w, bridge_c_b;
  Tensor dec1_w, dec1_b;
  Tensor dec2_w, dec2_b;
  Tensor att_query_w, att_key_w, att_b, att_v;  // additive attention only
  Tensor out_w, out_b;
  Tensor gate_w, gate_b;  // copy gate only

  /// Allocates every tensor for `hp`, uniform(-scale, scale).
  static Seq2SeqParams init(const Hyperparams& hp, std::uint64_t seed, double scale = 0.1);

  /// Every allocated tensor in its fixed declaration order.
  std::vector<std::pair<std::string, Tensor*>> named();
  std::vector<std::pair<std::string, const Tensor*>> named() const;

  void zero_grad();
  std::size_t parameter_count() const;
};

/// A TAP context mapped to model ids. Out-of-vocabulary lexemes embed as UNK
/// but keep their own extended id (vocab_size + k) for copying.
struct EncodedInput {
  std::vector<std::size_t> ids;
  std::vector<std::size_t> ext_ids;
  std::vector<std::string> oov;
};

EncodedInput encode_input(const ModelVocab& vocab, const std::vector<std::string>& lexemes);

/// Target ids terminated by the stop id. OOV lexemes map to their extended id
/// when copying is enabled and the lexeme occurs in the input, else UNK.
std::vector<std::size_t> encode_target(const ModelVocab& vocab, const EncodedInput& input,
                                       const std::vector<std::string>& lexemes, bool copy_enabled);

struct Example {
  EncodedInput input;
  std::vector<std::size_t> target;
};

struct LstmState {
  Var h;
  Var c;
};

struct Encoded {
  std::vector<Var> states;  // n rows of size 2h: concat(forward, backward)
  std::vector<Var> keys;    // projected states for additive attention
  LstmState final_state;    // bridged decoder initial state
};

struct DecoderState {
  LstmState layer1;
  LstmState layer2;
};

struct AttentionResult {
  Var context;
  Var alpha;
};

struct StepResult {
  Var dist;
  Var alpha;
  Var p_gen;  // invalid when copy is disabled
  Var p_vocab;
  DecoderState state;
};

enum class Mode { Train, Infer };

class Seq2Seq {
 public:
  explicit Seq2Seq(Seq2SeqParams params) : params_(std::move(params)) {}

  Seq2SeqParams& params() { return params_; }
  const Seq2SeqParams& params() const { return params_; }
  const Hyperparams& hp() const { return params_.hp; }

  /// Output distribution width for one input: vocab plus its OOV slots when
  /// copying is enabled.
  std::size_t output_size(const EncodedInput& input) const;

  /// Throws std::invalid_argument on empty input.
  Encoded encode(Tape& tape, std::span<const std::size_t> ids, Mode mode, Rng* rng);

  AttentionResult attend(Tape& tape, const Encoded& enc, Var query);

  DecoderState initial_state(const Encoded& enc) const;

  /// `prev_token` may be an extended id; it embeds as UNK then.
  StepResult decode_step(Tape& tape, std::size_t prev_token, const DecoderState& state,
                         const Encoded& enc, const EncodedInput& input, Mode mode, Rng* rng,
                         std::optional<double> force_p_gen = std::nullopt);

  /// Mean teacher-forced negative log-likelihood over target steps.
  Var loss(Tape& tape, const Example& example, Mode mode, Rng* rng);

  /// Value-only loss (no tape kept). Throws NumericalError on NaN/Inf.
  double evaluate_loss(const Example& example);

 private:
  LstmState lstm_cell(Tape& tape, Tensor& w, Tensor& b, Var input, const LstmState& prev,
                      std::size_t hidden);

  Seq2SeqParams params_;
};

}  // namespace assertgen::neural
