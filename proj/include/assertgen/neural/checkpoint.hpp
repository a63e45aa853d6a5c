#pragma once

// Binary checkpoint: a magic line, the byte length of a JSON header, the JSON
// header, little-endian f64 payload (parameters, then Adam moments), and a
// trailing line holding the FNV-1a hash of header and payload.

#include <cstddef>
#include <filesystem>
#include <string>

#include "assertgen/neural/model.hpp"
#include "assertgen/neural/train.hpp"

namespace assertgen::neural {

inline constexpr const char* kCheckpointMagic = "ASSERTGEN-CKPT 1";

struct Checkpoint {
  Seq2SeqParams params;
  OptimizerState optimizer;
  ModelVocab vocab;
  std::string mode = "raw_copy";  // raw_copy | abstract
  std::size_t epochs_done = 0;
  double best_val_loss = 0.0;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);

/// Throws IntegrityError when the hash does not match or the layout is
/// damaged.
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace assertgen::neural
