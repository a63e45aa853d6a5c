#include "assertgen/pipeline.hpp"

#include <iostream>
#include <limits>
#include <set>

#include "assertgen/abstractor.hpp"
#include "assertgen/errors.hpp"
#include "assertgen/evalkit.hpp"
#include "assertgen/neural/checkpoint.hpp"
#include "assertgen/neural/inference.hpp"
#include "assertgen/tapio.hpp"
#include "assertgen/util.hpp"
#include "json.hpp"

namespace assertgen::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string mode_name(Mode m) { return m == Mode::Abstract ? "abstract" : "raw_copy"; }

Mode parse_mode(const std::string& s) {
  if (s == "raw_copy") return Mode::RawCopy;
  if (s == "abstract") return Mode::Abstract;
  throw InputError("unknown mode '" + s + "' (expected raw_copy or abstract)");
}

namespace {

template <typename T>
T get_field(const ordered_json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const ordered_json::exception&) {
    throw InputError("config field '" + key + "' has the wrong type");
  }
}

neural::AttentionKind parse_attention(const std::string& s) {
  if (s == "additive") return neural::AttentionKind::Additive;
  if (s == "dot") return neural::AttentionKind::Dot;
  throw InputError("unknown attention '" + s + "'");
}

fs::path out_file(const PipelineConfig& c, const std::string& name) { return c.output_dir / name; }

std::string json_text(const ordered_json& j) { return j.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n"; }

}  // namespace

PipelineConfig config_from_json(const std::string& text, PipelineConfig c) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "corpus_dir") c.corpus_dir = get_field<std::string>(v, key);
    else if (key == "output_dir") c.output_dir = get_field<std::string>(v, key);
    else if (key == "vocab_capacity") c.vocab_capacity = get_field<std::size_t>(v, key);
    else if (key == "max_context_tokens") c.max_context_tokens = get_field<std::size_t>(v, key);
    else if (key == "split_ratios") {
      auto r = get_field<std::vector<double>>(v, key);
      if (r.size() != 3) throw InputError("split_ratios needs three values");
      c.split_ratios = miner::SplitRatios{r[0], r[1], r[2]};
    }
    else if (key == "seed") c.seed = get_field<std::uint64_t>(v, key);
    else if (key == "require_junit4") c.require_junit4 = get_field<bool>(v, key);
    else if (key == "abstraction_cap") c.abstraction_cap = get_field<std::size_t>(v, key);
    else if (key == "mode") c.mode = parse_mode(get_field<std::string>(v, key));
    else if (key == "embed_dim") c.embed_dim = get_field<std::size_t>(v, key);
    else if (key == "hidden") c.hidden = get_field<std::size_t>(v, key);
    else if (key == "dropout") c.dropout = get_field<double>(v, key);
    else if (key == "attention") c.attention = parse_attention(get_field<std::string>(v, key));
    else if (key == "epochs") c.epochs = get_field<std::size_t>(v, key);
    else if (key == "batch_size") c.batch_size = get_field<std::size_t>(v, key);
    else if (key == "patience") c.patience = get_field<std::size_t>(v, key);
    else if (key == "learning_rate") c.learning_rate = get_field<double>(v, key);
    else if (key == "clip_norm") c.clip_norm = get_field<double>(v, key);
    else if (key == "beam_sizes") c.beam_sizes = get_field<std::vector<std::size_t>>(v, key);
    else if (key == "max_decode_len") c.max_decode_len = get_field<std::size_t>(v, key);
    else if (key == "bleu_sample_size") c.bleu_sample_size = get_field<std::size_t>(v, key);
    else throw InputError("unknown config key '" + key + "'");
  }
  return c;
}

std::string config_to_json(const PipelineConfig& c) {
  ordered_json j;
  j["corpus_dir"] = c.corpus_dir.string();
  j["output_dir"] = c.output_dir.string();
  j["vocab_capacity"] = c.vocab_capacity;
  j["max_context_tokens"] = c.max_context_tokens;
  j["split_ratios"] = {c.split_ratios.train, c.split_ratios.validation, c.split_ratios.test};
  j["seed"] = c.seed;
  j["require_junit4"] = c.require_junit4;
  j["abstraction_cap"] = c.abstraction_cap;
  j["mode"] = mode_name(c.mode);
  j["embed_dim"] = c.embed_dim;
  j["hidden"] = c.hidden;
  j["dropout"] = c.dropout;
  j["attention"] = c.attention == neural::AttentionKind::Dot ? "dot" : "additive";
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["patience"] = c.patience;
  j["learning_rate"] = c.learning_rate;
  j["clip_norm"] = c.clip_norm;
  j["beam_sizes"] = c.beam_sizes;
  j["max_decode_len"] = c.max_decode_len;
  j["bleu_sample_size"] = c.bleu_sample_size;
  return json_text(j);
}

MineSummary cmd_mine(const PipelineConfig& config) {
  MineSummary summary;
  miner::CorpusOptions options;
  options.require_junit4 = config.require_junit4;
  auto taps = miner::mine_corpus(config.corpus_dir, options, summary.stats);
  if (taps.empty()) throw InputError("no test-assert pairs found in " + config.corpus_dir.string());

  auto vocab = Vocabulary::build(taps, config.vocab_capacity);
  auto filtered = miner::filter_taps(taps, vocab, config.max_context_tokens);
  summary.filter = filtered.report;
  if (filtered.kept.empty()) throw InputError("every mined pair was filtered out");
  auto split = miner::split_dataset(filtered.kept, config.split_ratios, config.seed);
  summary.train = split.train.size();
  summary.validation = split.validation.size();
  summary.test = split.test.size();

  tapio::write_file(out_file(config, "taps.jsonl"), tapio::taps_to_jsonl(filtered.kept));
  tapio::write_file(out_file(config, "train.jsonl"), tapio::taps_to_jsonl(split.train));
  tapio::write_file(out_file(config, "val.jsonl"), tapio::taps_to_jsonl(split.validation));
  tapio::write_file(out_file(config, "test.jsonl"), tapio::taps_to_jsonl(split.test));
  tapio::write_file(out_file(config, "filter_report.json"), tapio::filter_report_json(filtered.report));
  tapio::write_file(out_file(config, "vocab.tsv"), vocab.to_tsv());

  std::string zipf = "rank,frequency\n";
  for (std::size_t i = 0; i < vocab.zipf().size(); ++i) {
    zipf += std::to_string(i + 1) + "," + std::to_string(vocab.zipf()[i]) + "\n";
  }
  tapio::write_file(out_file(config, "zipf.csv"), zipf);

  const auto& s = summary.stats;
  ordered_json stats;
  stats["projects"] = s.projects;
  stats["projects_skipped"] = s.projects_skipped;
  stats["files"] = s.files;
  stats["files_skipped"] = s.files_skipped;
  stats["test_methods"] = s.test_methods;
  stats["no_assert"] = s.no_assert;
  stats["multiple_asserts"] = s.multiple_asserts;
  stats["with_focal"] = s.with_focal;
  stats["vocab_coverage"] = vocab.coverage(taps);
  tapio::write_file(out_file(config, "mining_stats.json"), json_text(stats));
  return summary;
}

AbstractSummary cmd_abstract(const PipelineConfig& config, const std::optional<fs::path>& vocab_path) {
  const fs::path vp = vocab_path.value_or(out_file(config, "vocab.tsv"));
  if (!fs::exists(vp)) throw InputError("vocabulary file not found: " + vp.string());
  const auto loaded = Vocabulary::from_tsv(tapio::read_file(vp));
  const Vocabulary idioms(loaded.entries(), config.vocab_capacity);

  AbstractSummary summary;
  ordered_json report;
  std::vector<abstractor::AbstractTap> train_abstract;
  for (const std::string split : {"train", "val", "test"}) {
    const auto raw = tapio::taps_from_jsonl(tapio::read_file(out_file(config, split + ".jsonl")));
    auto result = abstractor::abstract_dataset(raw, idioms, config.abstraction_cap);

    std::map<std::string, const miner::TapRecord*> by_id;
    for (const auto& t : raw) by_id.emplace(t.id, &t);
    for (const auto& a : result.kept) {
      const auto* t = by_id.at(a.raw_id);
      auto ctx = abstractor::unabstract(a.context_tokens, a.map);
      auto tgt = abstractor::unabstract(a.target_tokens, a.map);
      if (!ctx.unresolved.empty() || !tgt.unresolved.empty() || ctx.tokens != t->context_tokens ||
          tgt.tokens != t->target_tokens) {
        throw IntegrityError("abstraction round trip failed for " + a.raw_id);
      }
    }
    report[split] = {{"input_count", result.report.input_count},
                     {"removed_id_overflow", result.report.removed_id_overflow},
                     {"removed_duplicate", result.report.removed_duplicate},
                     {"kept", result.report.kept}};
    summary.kept += result.report.kept;
    summary.removed_id_overflow += result.report.removed_id_overflow;
    summary.removed_duplicate += result.report.removed_duplicate;
    tapio::write_file(out_file(config, "abstract_" + split + ".jsonl"), tapio::abstract_taps_to_jsonl(result.kept));
    if (split == "train") train_abstract = std::move(result.kept);
  }
  if (train_abstract.empty()) throw InputError("abstract training split is empty");

  std::vector<const std::vector<std::string>*> seqs;
  for (const auto& a : train_abstract) {
    seqs.push_back(&a.context_tokens);
    seqs.push_back(&a.target_tokens);
  }
  auto abstract_vocab = Vocabulary::build_from_sequences(seqs, std::numeric_limits<std::size_t>::max());
  tapio::write_file(out_file(config, "abstract_vocab.tsv"), abstract_vocab.to_tsv());
  std::vector<std::string> idiom_list;
  for (const auto& e : idioms.entries()) idiom_list.push_back(e.lexeme);
  report["idioms"] = idiom_list;
  tapio::write_file(out_file(config, "abstract_report.json"), json_text(report));
  return summary;
}

std::vector<neural::Example> make_examples(const neural::ModelVocab& vocab,
                                           const std::vector<std::vector<std::string>>& contexts,
                                           const std::vector<std::vector<std::string>>& targets, bool copy) {
  std::vector<neural::Example> out;
  out.reserve(contexts.size());
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    if (contexts[i].empty()) continue;
    neural::Example e;
    e.input = neural::encode_input(vocab, contexts[i]);
    e.target = neural::encode_target(vocab, e.input, targets[i], copy);
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

struct Sequences {
  std::vector<std::vector<std::string>> contexts;
  std::vector<std::vector<std::string>> targets;
  std::vector<std::string> ids;
  std::vector<abstractor::AbstractionMap> maps;  // abstract mode only
};

Sequences load_sequences(Mode mode, const fs::path& path) {
  Sequences s;
  const auto text = tapio::read_file(path);
  if (mode == Mode::RawCopy) {
    for (auto& t : tapio::taps_from_jsonl(text)) {
      s.ids.push_back(t.id);
      s.contexts.push_back(std::move(t.context_tokens));
      s.targets.push_back(std::move(t.target_tokens));
    }
  } else {
    for (auto& t : tapio::abstract_taps_from_jsonl(text)) {
      s.ids.push_back(t.raw_id);
      s.contexts.push_back(std::move(t.context_tokens));
      s.targets.push_back(std::move(t.target_tokens));
      s.maps.push_back(std::move(t.map));
    }
  }
  return s;
}

std::string split_file(Mode mode, const std::string& split) {
  return mode == Mode::Abstract ? "abstract_" + split + ".jsonl" : split + ".jsonl";
}

fs::path default_checkpoint(const PipelineConfig& c, Mode mode) {
  return out_file(c, "model-" + mode_name(mode) + ".ckpt");
}

}  // namespace

TrainSummary cmd_train(const PipelineConfig& config, const TrainOptions& options) {
  const Mode mode = config.mode;
  const bool copy = mode == Mode::RawCopy;
  const auto train_seq = load_sequences(mode, options.train_file.value_or(out_file(config, split_file(mode, "train"))));
  const auto val_seq = load_sequences(mode, options.val_file.value_or(out_file(config, split_file(mode, "val"))));

  neural::Checkpoint ckpt;
  std::size_t first_epoch = 0;
  if (options.resume) {
    ckpt = neural::load_checkpoint(*options.resume);
    if (ckpt.mode != mode_name(mode)) {
      throw InputError("checkpoint was trained in mode " + ckpt.mode + ", not " + mode_name(mode));
    }
    first_epoch = ckpt.epochs_done;
  } else {
    const fs::path vp = out_file(config, mode == Mode::Abstract ? "abstract_vocab.tsv" : "vocab.tsv");
    if (!fs::exists(vp)) throw InputError("vocabulary file not found: " + vp.string());
    const auto vocab = Vocabulary::from_tsv(tapio::read_file(vp));
    std::vector<std::string> lexemes;
    for (const auto& e : vocab.entries()) lexemes.push_back(e.lexeme);
    ckpt.vocab = neural::ModelVocab(lexemes);
    neural::Hyperparams hp;
    hp.vocab_size = ckpt.vocab.size();
    hp.embed_dim = config.embed_dim;
    hp.hidden = config.hidden;
    hp.copy_enabled = copy;
    hp.attention = config.attention;
    hp.dropout = config.dropout;
    ckpt.params = neural::Seq2SeqParams::init(hp, config.seed);
    ckpt.optimizer.learning_rate = config.learning_rate;
    ckpt.mode = mode_name(mode);
  }

  auto train_set = make_examples(ckpt.vocab, train_seq.contexts, train_seq.targets, copy);
  auto val_set = make_examples(ckpt.vocab, val_seq.contexts, val_seq.targets, copy);
  neural::Seq2Seq model(std::move(ckpt.params));

  neural::TrainConfig tc;
  tc.max_epochs = config.epochs;
  tc.batch_size = config.batch_size;
  tc.patience = config.patience;
  tc.seed = config.seed;
  tc.clip_norm = config.clip_norm;
  auto result = neural::train(model, train_set, val_set, tc, ckpt.optimizer, first_epoch);

  ckpt.params = std::move(model.params());
  ckpt.epochs_done = first_epoch + result.history.size();
  ckpt.best_val_loss = result.best_val_loss;
  TrainSummary summary;
  summary.checkpoint = options.checkpoint.value_or(default_checkpoint(config, mode));
  if (summary.checkpoint.has_parent_path()) fs::create_directories(summary.checkpoint.parent_path());
  neural::save_checkpoint(summary.checkpoint, ckpt);

  const fs::path history_path = out_file(config, "history-" + mode_name(mode) + ".csv");
  std::string history = neural::history_csv(result.history);
  if (options.resume && fs::exists(history_path)) {
    history = tapio::read_file(history_path) + history.substr(history.find('\n') + 1);
  }
  tapio::write_file(history_path, history);

  summary.result = std::move(result);
  summary.optimizer_step = ckpt.optimizer.step;
  summary.epochs_done = ckpt.epochs_done;
  return summary;
}

std::size_t cmd_infer(const PipelineConfig& config, const InferOptions& options) {
  const auto ckpt_path = options.checkpoint.value_or(default_checkpoint(config, config.mode));
  auto ckpt = neural::load_checkpoint(ckpt_path);
  const Mode mode = parse_mode(ckpt.mode);
  const auto inputs = load_sequences(mode, options.input.value_or(out_file(config, split_file(mode, "test"))));
  neural::Seq2Seq model(std::move(ckpt.params));
  const auto& vocab = ckpt.vocab;
  if (config.beam_sizes.empty()) throw InputError("no beam sizes given");

  auto decode = [&](std::size_t i, std::size_t k) {
    evalkit::PredictionRecord rec;
    rec.id = inputs.ids[i];
    rec.k = k;
    for (auto& c : neural::predict(model, vocab, inputs.contexts[i], k, config.max_decode_len)) {
      auto tokens = mode == Mode::Abstract ? abstractor::unabstract(c.tokens, inputs.maps[i]).tokens : c.tokens;
      rec.candidates.push_back(std::move(tokens));
      rec.log_probs.push_back(c.log_prob);
    }
    return rec;
  };

  auto per_input = parallel_map<std::vector<evalkit::PredictionRecord>>(inputs.ids.size(), [&](std::size_t i) {
    std::vector<evalkit::PredictionRecord> recs;
    for (std::size_t k : config.beam_sizes) recs.push_back(decode(i, k));
    return recs;
  });
  std::vector<evalkit::PredictionRecord> records;
  for (auto& recs : per_input) {
    for (auto& r : recs) records.push_back(std::move(r));
  }
  tapio::write_file(options.output.value_or(out_file(config, "predictions-" + mode_name(mode) + ".jsonl")),
                    evalkit::predictions_to_jsonl(records));

  if (options.timing) {
    // Inputs are already abstracted and candidates are not mapped back here,
    // so only decoding is timed.
    auto report = evalkit::timing_harness(inputs.ids.size(), config.beam_sizes, [&](std::size_t k, std::size_t i) {
      neural::predict(model, vocab, inputs.contexts[i], k, config.max_decode_len);
    });
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    ordered_json t = ordered_json::object();
    for (const auto& [k, s] : report.seconds_per_input) t[std::to_string(k)] = s;
    ordered_json j;
    j["seconds_per_input"] = t;
    j["repeat_noise"] = report.repeat_noise;
    j["monotone"] = report.monotone;
    j["warnings"] = report.warnings;
    tapio::write_file(out_file(config, "timing-" + mode_name(mode) + ".json"), json_text(j));
  }
  return records.size();
}

namespace {

std::map<std::string, evalkit::Tokens> load_gold(const fs::path& path, std::vector<miner::TapRecord>* raw_taps) {
  const auto text = tapio::read_file(path);
  std::map<std::string, evalkit::Tokens> gold;
  auto lines = tapio::jsonl_lines(text);
  const bool abstract_file = !lines.empty() && ordered_json::parse(lines.front()).contains("raw_id");
  if (abstract_file) {
    for (const auto& a : tapio::abstract_taps_from_jsonl(text)) {
      gold[a.raw_id] = abstractor::unabstract(a.target_tokens, a.map).tokens;
    }
  } else {
    auto taps = tapio::taps_from_jsonl(text);
    for (const auto& t : taps) gold[t.id] = t.target_tokens;
    if (raw_taps) *raw_taps = std::move(taps);
  }
  return gold;
}

std::set<std::string> perfect_ids_at(const std::vector<evalkit::PredictionRecord>& preds,
                                     const std::map<std::string, evalkit::Tokens>& gold, std::size_t k,
                                     std::set<std::string>* all_ids) {
  std::set<std::string> out;
  for (const auto& p : preds) {
    if (p.k != k) continue;
    auto it = gold.find(p.id);
    if (it == gold.end()) continue;
    if (all_ids) all_ids->insert(p.id);
    if (evalkit::perfect_prediction(p.candidates, it->second)) out.insert(p.id);
  }
  return out;
}

std::size_t smallest_k(const std::vector<evalkit::PredictionRecord>& preds) {
  std::size_t k = std::numeric_limits<std::size_t>::max();
  for (const auto& p : preds) k = std::min(k, p.k);
  return k;
}

}  // namespace

evalkit::EvalReport cmd_eval(const PipelineConfig& config, const EvalOptions& options) {
  const Mode mode = config.mode;
  const std::string suffix = mode_name(mode);
  const auto preds = evalkit::predictions_from_jsonl(
      tapio::read_file(options.predictions.value_or(out_file(config, "predictions-" + suffix + ".jsonl"))));
  std::vector<miner::TapRecord> raw_taps;
  const auto gold = load_gold(options.gold.value_or(out_file(config, "test.jsonl")), &raw_taps);

  std::optional<Vocabulary> vocab;
  const fs::path vocab_path = options.vocab.value_or(out_file(config, "vocab.tsv"));
  if (mode == Mode::RawCopy && !raw_taps.empty() && fs::exists(vocab_path)) {
    vocab = Vocabulary::from_tsv(tapio::read_file(vocab_path));
  }
  auto report = evalkit::evaluate(preds, gold, vocab ? &*vocab : nullptr, vocab ? &raw_taps : nullptr);

  if (options.timing) {
    auto j = ordered_json::parse(tapio::read_file(*options.timing));
    evalkit::TimingReport t;
    for (const auto& [k, s] : j.at("seconds_per_input").items()) t.seconds_per_input[std::stoull(k)] = s.get<double>();
    t.repeat_noise = j.value("repeat_noise", 0.0);
    t.monotone = j.value("monotone", true);
    t.warnings = j.value("warnings", std::vector<std::string>{});
    report.timing = std::move(t);
  }

  tapio::write_file(out_file(config, "eval_report-" + suffix + ".json"), evalkit::eval_report_json(report));
  tapio::write_file(out_file(config, "edit_distance-" + suffix + ".csv"),
                    evalkit::histogram_csv(report.edit_distance_histogram));

  // Frequency baseline next to the model for k = 1, 5, 10.
  const fs::path train_path = options.train.value_or(out_file(config, "train.jsonl"));
  if (fs::exists(train_path)) {
    std::vector<evalkit::Tokens> train_targets;
    std::map<std::string, evalkit::Tokens> train_gold = load_gold(train_path, nullptr);
    for (auto& [id, t] : train_gold) train_targets.push_back(t);
    std::vector<evalkit::Tokens> test_targets;
    for (const auto& [id, t] : gold) test_targets.push_back(t);
    std::string csv = "k,test_count,frequency_perfect,model_perfect\n";
    for (std::size_t k : {1, 5, 10}) {
      csv += std::to_string(k) + "," + std::to_string(test_targets.size()) + "," +
             std::to_string(evalkit::frequency_baseline(train_targets, test_targets, k)) + ",";
      for (const auto& s : report.per_beam) {
        if (s.k == k) csv += std::to_string(s.perfect_count);
      }
      csv += "\n";
    }
    tapio::write_file(out_file(config, "baseline-" + suffix + ".csv"), csv);
  }

  // BLEU-bucket samples of imperfect predictions for manual review.
  std::vector<evalkit::ScoredPair> imperfect;
  for (const auto& p : preds) {
    if (p.k != report.reference_beam) continue;
    auto it = gold.find(p.id);
    if (it == gold.end() || evalkit::perfect_prediction(p.candidates, it->second)) continue;
    auto cand = evalkit::chosen_candidate(p, it->second);
    imperfect.push_back({p.id, cand, it->second, evalkit::bleu4(cand, it->second)});
  }
  auto sample = evalkit::bleu_bucket_sample(imperfect, config.bleu_sample_size, config.seed);
  for (const auto& w : sample.warnings) std::cerr << "warning: " << w << "\n";
  std::string samples;
  for (std::size_t b = 0; b < sample.buckets.size(); ++b) {
    const auto lo = static_cast<int>(evalkit::BucketSample::kEdges[b]);
    const auto hi = static_cast<int>(evalkit::BucketSample::kEdges[b + 1]) - 1;
    for (const auto& s : sample.buckets[b]) {
      ordered_json j;
      j["bucket"] = std::to_string(lo) + "-" + std::to_string(hi);
      j["id"] = s.id;
      j["prediction"] = join_tokens(s.prediction);
      j["gold"] = join_tokens(s.gold);
      j["bleu4"] = s.bleu;
      samples += j.dump(-1, ' ', false, ordered_json::error_handler_t::replace) + "\n";
    }
  }
  tapio::write_file(out_file(config, "bleu_samples-" + suffix + ".jsonl"), samples);

  if (options.abstract_predictions) {
    const auto abstract_preds = evalkit::predictions_from_jsonl(tapio::read_file(*options.abstract_predictions));
    std::set<std::string> raw_ids, abstract_ids;
    auto pp_r = perfect_ids_at(preds, gold, smallest_k(preds), &raw_ids);
    auto pp_a = perfect_ids_at(abstract_preds, gold, smallest_k(abstract_preds), &abstract_ids);
    // Ids evaluated by only one model (dropped by one pipeline) stay out of
    // the denominators.
    std::size_t excluded = 0;
    for (const auto& id : raw_ids) excluded += abstract_ids.count(id) ? 0 : 1;
    for (const auto& id : abstract_ids) excluded += raw_ids.count(id) ? 0 : 1;
    std::erase_if(pp_r, [&](const std::string& id) { return !abstract_ids.count(id); });
    std::erase_if(pp_a, [&](const std::string& id) { return !raw_ids.count(id); });
    auto overlap = evalkit::overlap_metrics(pp_r, pp_a);
    overlap.excluded_ids = excluded;
    tapio::write_file(out_file(config, "overlap_report.json"), evalkit::overlap_report_json(overlap));
  }
  return report;
}

}  // namespace assertgen::pipeline
