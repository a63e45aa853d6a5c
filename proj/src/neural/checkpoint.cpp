#include "assertgen/neural/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "assertgen/errors.hpp"
#include "assertgen/util.hpp"

namespace assertgen::neural {

using nlohmann::ordered_json;

namespace {

void put_f64(std::string& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_f64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw IntegrityError("checkpoint payload truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  pos += 8;
  return std::bit_cast<double>(bits);
}

std::string read_line(const std::string& in, std::size_t& pos) {
  auto nl = in.find('\n', pos);
  if (nl == std::string::npos) throw IntegrityError("checkpoint header truncated");
  std::string line = in.substr(pos, nl - pos);
  pos = nl + 1;
  return line;
}

const char* attention_name(AttentionKind k) { return k == AttentionKind::Dot ? "dot" : "additive"; }

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  const auto& p = ckpt.params;
  ordered_json header;
  header["hyperparams"] = {{"vocab_size", p.hp.vocab_size},
                           {"embed_dim", p.hp.embed_dim},
                           {"hidden", p.hp.hidden},
                           {"copy", p.hp.copy_enabled},
                           {"attention", attention_name(p.hp.attention)},
                           {"dropout", p.hp.dropout}};
  header["mode"] = ckpt.mode;
  header["epochs_done"] = ckpt.epochs_done;
  header["best_val_loss"] = ckpt.best_val_loss;
  const auto& opt = ckpt.optimizer;
  header["optimizer"] = {{"kind", opt.kind == OptimizerKind::Adam ? "adam" : "sgd"},
                         {"learning_rate", opt.learning_rate},
                         {"beta1", opt.beta1},
                         {"beta2", opt.beta2},
                         {"epsilon", opt.epsilon},
                         {"step", opt.step},
                         {"has_moments", !opt.first_moment.empty()}};
  ordered_json tensors = ordered_json::array();
  for (const auto& [name, t] : p.named()) tensors.push_back({{"name", name}, {"shape", t->shape}});
  header["tensors"] = tensors;
  header["vocab"] = ckpt.vocab.tokens();

  const std::string header_text = header.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
  std::string payload;
  for (const auto& [name, t] : p.named()) {
    for (double v : t->values) put_f64(payload, v);
  }
  for (const auto* moments : {&opt.first_moment, &opt.second_moment}) {
    for (const auto& m : *moments) {
      for (double v : m) put_f64(payload, v);
    }
  }
  Fnv1a64 h;
  h.update(header_text);
  h.update(payload);

  std::string out = kCheckpointMagic;
  out += '\n';
  out += std::to_string(header_text.size());
  out += '\n';
  out += header_text;
  out += payload;
  out += h.hex();
  out += '\n';
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  std::size_t pos = 0;
  if (read_line(bytes, pos) != kCheckpointMagic) throw IntegrityError("not a checkpoint file");
  std::size_t header_len = 0;
  try {
    header_len = std::stoull(read_line(bytes, pos));
  } catch (const std::logic_error&) {
    throw IntegrityError("bad checkpoint header length");
  }
  if (pos + header_len + 17 > bytes.size()) throw IntegrityError("checkpoint truncated");
  const std::string header_text = bytes.substr(pos, header_len);
  const std::size_t payload_begin = pos + header_len;
  const std::size_t payload_end = bytes.size() - 17;
  const std::string payload = bytes.substr(payload_begin, payload_end - payload_begin);
  const std::string stored_hash = bytes.substr(payload_end, 16);
  Fnv1a64 h;
  h.update(header_text);
  h.update(payload);
  if (h.hex() != stored_hash || bytes.back() != '\n') {
    throw IntegrityError("checkpoint hash mismatch: expected " + stored_hash + ", computed " + h.hex());
  }

  ordered_json header;
  try {
    header = ordered_json::parse(header_text);
  } catch (const ordered_json::exception& e) {
    throw IntegrityError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }

  Checkpoint ckpt;
  try {
    Hyperparams hp;
    const auto& jh = header.at("hyperparams");
    hp.vocab_size = jh.at("vocab_size").get<std::size_t>();
    hp.embed_dim = jh.at("embed_dim").get<std::size_t>();
    hp.hidden = jh.at("hidden").get<std::size_t>();
    hp.copy_enabled = jh.at("copy").get<bool>();
    hp.attention = jh.at("attention").get<std::string>() == "dot" ? AttentionKind::Dot : AttentionKind::Additive;
    hp.dropout = jh.at("dropout").get<double>();
    ckpt.params = Seq2SeqParams::init(hp, 0);
    ckpt.mode = header.at("mode").get<std::string>();
    ckpt.epochs_done = header.at("epochs_done").get<std::size_t>();
    ckpt.best_val_loss = header.value("best_val_loss", 0.0);
    const auto& jo = header.at("optimizer");
    auto& opt = ckpt.optimizer;
    opt.kind = jo.at("kind").get<std::string>() == "sgd" ? OptimizerKind::Sgd : OptimizerKind::Adam;
    opt.learning_rate = jo.at("learning_rate").get<double>();
    opt.beta1 = jo.at("beta1").get<double>();
    opt.beta2 = jo.at("beta2").get<double>();
    opt.epsilon = jo.at("epsilon").get<double>();
    opt.step = jo.at("step").get<std::size_t>();
    const bool has_moments = jo.at("has_moments").get<bool>();

    auto vocab_tokens = header.at("vocab").get<std::vector<std::string>>();
    if (vocab_tokens.size() < kReservedIds) throw IntegrityError("checkpoint vocabulary too small");
    ckpt.vocab = ModelVocab(std::vector<std::string>(vocab_tokens.begin() + kReservedIds, vocab_tokens.end()));
    if (ckpt.vocab.size() != hp.vocab_size) throw IntegrityError("checkpoint vocabulary size mismatch");

    auto tensors = ckpt.params.named();
    const auto& jt = header.at("tensors");
    if (jt.size() != tensors.size()) throw IntegrityError("checkpoint tensor count mismatch");
    std::size_t at = 0;
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      if (jt[i].at("name").get<std::string>() != tensors[i].first ||
          jt[i].at("shape").get<std::vector<std::size_t>>() != tensors[i].second->shape) {
        throw IntegrityError("checkpoint tensor layout mismatch at " + tensors[i].first);
      }
      for (double& v : tensors[i].second->values) v = get_f64(payload, at);
    }
    if (has_moments) {
      for (auto* moments : {&opt.first_moment, &opt.second_moment}) {
        for (const auto& [name, t] : tensors) {
          std::vector<double> m(t->size());
          for (double& v : m) v = get_f64(payload, at);
          moments->push_back(std::move(m));
        }
      }
    }
    if (at != payload.size()) throw IntegrityError("checkpoint payload has trailing bytes");
  } catch (const ordered_json::exception& e) {
    throw IntegrityError(std::string("checkpoint header incomplete: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  const std::string bytes = serialize_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_checkpoint(ss.str());
}

}  // namespace assertgen::neural
