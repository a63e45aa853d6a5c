// Acceptance runner: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "assertgen/abstractor.hpp"
#include "assertgen/evalkit.hpp"
#include "assertgen/neural/inference.hpp"
#include "assertgen/neural/train.hpp"
#include "assertgen/pipeline.hpp"
#include "assertgen/tapio.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace assertgen;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1 -------------------------------------------------------------------------

Outcome abstraction_round_trip() {
  const auto t0 = Clock::now();
  Rng rng(20240601);
  std::vector<miner::TapRecord> taps;
  for (int i = 0; i < 10000; ++i) taps.push_back(testsupport::random_tap(rng));
  auto idioms = testsupport::random_idioms(rng, taps, 40);
  std::size_t mismatches = 0, unresolved = 0;
  for (const auto& t : taps) {
    auto a = abstractor::abstract_tap(t, idioms);
    auto ctx = abstractor::unabstract(a.context_tokens, a.map);
    auto tgt = abstractor::unabstract(a.target_tokens, a.map);
    unresolved += ctx.unresolved.size() + tgt.unresolved.size();
    if (ctx.tokens != t.context_tokens || tgt.tokens != t.target_tokens) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && unresolved == 0 && secs < 60.0,
          std::to_string(taps.size()) + " TAPs, " + std::to_string(mismatches) + " mismatches, " +
              std::to_string(unresolved) + " unresolved, " + fmt("%.1fs < 60s", secs)};
}

// 2 -------------------------------------------------------------------------

Outcome gradient_check() {
  const auto t0 = Clock::now();
  auto vocab = testsupport::toy_vocab(12);
  Rng rng(77);
  double worst_copy = 0.0, worst_plain = 0.0;
  std::string where;
  for (bool copy : {true, false}) {
    for (int trial = 0; trial < 5; ++trial) {
      auto hp = testsupport::toy_hp(12, 4, 4, copy, trial % 2 ? neural::AttentionKind::Dot
                                                                : neural::AttentionKind::Additive);
      neural::Seq2Seq model(neural::Seq2SeqParams::init(hp, 100 + trial, 0.5));
      auto ex = testsupport::random_example(rng, vocab, 5, copy);
      auto r = testsupport::gradient_check(model, ex);
      double& worst = copy ? worst_copy : worst_plain;
      if (r.max_rel_error > worst) {
        worst = r.max_rel_error;
        if (worst > 1e-4) where = r.worst;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst_copy <= 1e-4 && worst_plain <= 1e-4 && secs < 120.0,
          "max rel error copy " + fmt("%.2e", worst_copy) + ", no-copy " + fmt("%.2e", worst_plain) +
              " (<= 1e-4)" + (where.empty() ? "" : " at " + where) + ", " + fmt("%.1fs < 120s", secs)};
}

// 3 -------------------------------------------------------------------------

Outcome probability_closure() {
  auto vocab = testsupport::toy_vocab(12);
  Rng rng(3);
  std::size_t steps = 0, bad_sum = 0, negative = 0, degenerate_bad = 0;
  double worst = 0.0;
  while (steps < 1000) {
    const bool copy = steps % 2 == 0;
    neural::Seq2Seq model(neural::Seq2SeqParams::init(testsupport::toy_hp(12, 6, 5, copy), rng.next(), 1.0));
    auto in = neural::encode_input(vocab, testsupport::random_lexemes(rng, 12, 8, 0.3));
    neural::Tape tape(false);
    auto enc = model.encode(tape, in.ids, neural::Mode::Infer, nullptr);
    auto state = model.initial_state(enc);
    std::size_t prev = neural::kStartId;
    for (int t = 0; t < 10 && steps < 1000; ++t, ++steps) {
      auto r = model.decode_step(tape, prev, state, enc, in, neural::Mode::Infer, nullptr);
      auto dist = tape.value(r.dist);
      double sum = 0.0;
      for (double p : dist) {
        negative += p < 0.0;
        sum += p;
      }
      worst = std::max(worst, std::abs(sum - 1.0));
      bad_sum += std::abs(sum - 1.0) > 1e-6;
      for (const auto v : {r.alpha, r.p_vocab}) {
        double s = 0.0;
        for (double p : tape.value(v)) s += p;
        bad_sum += std::abs(s - 1.0) > 1e-6;
      }
      if (copy) {
        auto gen = model.decode_step(tape, prev, state, enc, in, neural::Mode::Infer, nullptr, 1.0);
        auto g = tape.value(gen.dist);
        auto pv = tape.value(gen.p_vocab);
        for (std::size_t w = 0; w < g.size(); ++w) degenerate_bad += g[w] != (w < pv.size() ? pv[w] : 0.0);
        auto cp = model.decode_step(tape, prev, state, enc, in, neural::Mode::Infer, nullptr, 0.0);
        auto alpha = tape.value(cp.alpha);
        std::vector<double> expected(model.output_size(in), 0.0);
        for (std::size_t i = 0; i < alpha.size(); ++i) expected[in.ext_ids[i]] += alpha[i];
        auto c = tape.value(cp.dist);
        degenerate_bad += !std::equal(c.begin(), c.end(), expected.begin(), expected.end());
      }
      // feed back a random token, extended ids included
      prev = rng.below(dist.size());
      state = r.state;
    }
  }
  // one-hot attention: a single input position receives all copy mass
  neural::Seq2Seq model(neural::Seq2SeqParams::init(testsupport::toy_hp(12, 4, 4, true), 5, 1.0));
  auto in = neural::encode_input(vocab, {"zork"});
  neural::Tape tape(false);
  auto enc = model.encode(tape, in.ids, neural::Mode::Infer, nullptr);
  auto r = model.decode_step(tape, neural::kStartId, model.initial_state(enc), enc, in, neural::Mode::Infer, nullptr,
                             0.0);
  auto d = tape.value(r.dist);
  for (std::size_t w = 0; w < d.size(); ++w) degenerate_bad += d[w] != (w == in.ext_ids[0] ? 1.0 : 0.0);

  return {bad_sum == 0 && negative == 0 && degenerate_bad == 0,
          std::to_string(steps) + " steps, max |sum-1| " + fmt("%.1e", worst) + " (<= 1e-6), " +
              std::to_string(negative) + " negative, " + std::to_string(degenerate_bad) +
              " inexact degenerate mixtures"};
}

// 4 -------------------------------------------------------------------------

Outcome beam_correctness() {
  auto vocab = testsupport::toy_vocab(12);
  Rng rng(4);
  std::size_t mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    neural::Seq2Seq model(neural::Seq2SeqParams::init(testsupport::toy_hp(12, 4, 4, i % 2 == 0), 1000 + i, 1.0));
    auto in = neural::encode_input(vocab, testsupport::random_lexemes(rng, 12, 6, 0.3));
    neural::Seq2SeqDecoder dec(model, in);
    auto beam = neural::beam_search(dec, 1, 12, neural::kStartId, neural::kStopId);
    auto greedy = neural::greedy_decode(dec, 12, neural::kStartId, neural::kStopId);
    if (beam.size() != 1 || beam[0].tokens != greedy.tokens) ++mismatches;
  }
  testsupport::HandModel hand;
  auto all = testsupport::enumerate_sequences(hand, 3, testsupport::HandModel::kStart, 0);
  auto top2 = neural::beam_search(hand, 2, 3, testsupport::HandModel::kStart, 0);
  bool exact = top2.size() == 2;
  for (std::size_t i = 0; exact && i < 2; ++i) {
    exact = top2[i].tokens == all[i].first && std::abs(top2[i].log_prob - all[i].second) < 1e-12;
  }
  return {mismatches == 0 && exact, "500 greedy comparisons, " + std::to_string(mismatches) +
                                        " mismatches; hand model top-2 vs " + std::to_string(all.size()) +
                                        " enumerated sequences " + (exact ? "equal" : "DIFFER")};
}

// 5 -------------------------------------------------------------------------

struct MemTap {
  std::vector<std::string> context;
  std::vector<std::string> target;
};

std::vector<MemTap> memorization_corpus() {
  const std::vector<std::string> types{"Box", "Cart", "Node", "Item", "Queue"};
  const std::vector<std::string> vars{"b", "c", "n", "item", "q", "v"};
  const std::vector<std::string> methods{"get", "size", "peek", "count", "first", "last"};
  Rng rng(55);
  std::vector<MemTap> out;
  for (int i = 0; i < 49; ++i) {
    const auto& T = types[i % types.size()];
    const auto& x = vars[rng.below(vars.size())];
    const auto& m = methods[rng.below(methods.size())];
    const std::string lit = std::to_string(rng.below(10));
    const std::string name = "test" + std::to_string(i);
    MemTap t;
    switch (i % 3) {
      case 0:
        t.context = jlex::split_lexemes("void " + name + " ( ) { " + T + " " + x + " = new " + T + " ( ) ; int r = " +
                                        x + " . " + m + " ( " + lit + " ) ; AssertPlaceHolder ; } int " + m +
                                        " ( int k ) { return k ; }");
        t.target = jlex::split_lexemes("assertEquals ( " + lit + " , r )");
        break;
      case 1:
        t.context = jlex::split_lexemes("void " + name + " ( ) { " + T + " " + x + " = new " + T +
                                        " ( ) ; AssertPlaceHolder ; } boolean " + m + " ( ) { return true ; }");
        t.target = jlex::split_lexemes("assertTrue ( " + x + " . " + m + " ( ) )");
        break;
      default:
        t.context = jlex::split_lexemes("void " + name + " ( ) { " + T + " " + x + " = new " + T +
                                        " ( ) ; AssertPlaceHolder ; } " + T + " " + m + " ( int k ) { return this ; }");
        t.target = jlex::split_lexemes("assertNotNull ( " + x + " . " + m + " ( " + lit + " ) )");
        break;
    }
    out.push_back(t);
  }
  out.push_back({jlex::split_lexemes("void testCopy ( ) { Box zorblaxQuux = new Box ( ) ; AssertPlaceHolder ; }"),
                 jlex::split_lexemes("assertNotNull ( zorblaxQuux )")});
  return out;
}

Outcome memorization() {
  const auto t0 = Clock::now();
  auto corpus = memorization_corpus();
  const std::string oov = "zorblaxQuux";
  std::vector<std::string> words;
  for (const auto& t : corpus) {
    for (const auto* seq : {&t.context, &t.target}) {
      for (const auto& w : *seq) {
        if (w != oov) words.push_back(w);
      }
    }
  }
  neural::ModelVocab vocab(words);
  std::vector<std::vector<std::string>> ctx, tgt;
  for (const auto& t : corpus) {
    ctx.push_back(t.context);
    tgt.push_back(t.target);
  }
  auto examples = pipeline::make_examples(vocab, ctx, tgt, true);

  neural::Hyperparams hp;
  hp.vocab_size = vocab.size();
  hp.embed_dim = 32;
  hp.hidden = 32;
  hp.copy_enabled = true;
  hp.dropout = 0.0;
  neural::Seq2Seq model(neural::Seq2SeqParams::init(hp, 11));
  neural::OptimizerState opt;
  opt.learning_rate = 5e-3;
  neural::TrainConfig cfg;
  cfg.batch_size = 10;
  cfg.patience = 1000;
  cfg.max_epochs = 10;

  auto perfect_rate = [&](bool& copied) {
    std::size_t perfect = 0;
    copied = false;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto cands = neural::predict(model, vocab, corpus[i].context, 5, 20);
      std::vector<evalkit::Tokens> toks;
      for (auto& c : cands) toks.push_back(c.tokens);
      if (evalkit::perfect_prediction(toks, corpus[i].target)) {
        ++perfect;
        if (i + 1 == corpus.size()) copied = true;
      }
    }
    return static_cast<double>(perfect) / static_cast<double>(corpus.size());
  };

  std::size_t epochs = 0;
  double rate = 0.0;
  bool copied = false;
  while (epochs < 500 && seconds_since(t0) < 570.0) {
    neural::train(model, examples, examples, cfg, opt, epochs);
    epochs += cfg.max_epochs;
    rate = perfect_rate(copied);
    if (rate >= 0.9 && copied) break;
  }
  const double secs = seconds_since(t0);
  return {rate >= 0.9 && copied && epochs <= 500 && secs < 600.0,
          fmt("%.0f%%", 100.0 * rate) + " perfect at beam 5 (>= 90%) after " + std::to_string(epochs) +
              " epochs (<= 500), OOV copy " + (copied ? "memorized" : "NOT memorized") + ", " +
              fmt("%.0fs < 600s", secs)};
}

// 6 -------------------------------------------------------------------------

std::vector<evalkit::Tokens> all_sequences(std::size_t max_len, std::size_t alphabet) {
  std::vector<evalkit::Tokens> out{{}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].size() == max_len) continue;
    for (std::size_t c = 0; c < alphabet; ++c) {
      auto s = out[i];
      s.push_back(std::string(1, static_cast<char>('a' + c)));
      out.push_back(s);
    }
  }
  return out;
}

// Every b up to max_len against a fixed a, walking a trie of b with one new
// Wagner-Fischer column per character. Returns the number of disagreements.
std::size_t edit_distance_trie_sweep(const evalkit::Tokens& a, std::size_t max_len, std::size_t alphabet,
                                     std::size_t& compared) {
  const std::size_t n = a.size();
  std::vector<std::vector<std::size_t>> cols(max_len + 1, std::vector<std::size_t>(n + 1));
  for (std::size_t i = 0; i <= n; ++i) cols[0][i] = i;
  evalkit::Tokens b;
  std::size_t bad = 0;
  std::function<void()> walk = [&]() {
    const auto& col = cols[b.size()];
    ++compared;
    if (evalkit::edit_distance(a, b) != col[n]) ++bad;
    if (b.size() == max_len) return;
    for (std::size_t c = 0; c < alphabet; ++c) {
      const std::string ch(1, static_cast<char>('a' + c));
      auto& next = cols[b.size() + 1];
      next[0] = b.size() + 1;
      for (std::size_t i = 1; i <= n; ++i) {
        next[i] = std::min({col[i] + 1, next[i - 1] + 1, col[i - 1] + (a[i - 1] == ch ? 0 : 1)});
      }
      b.push_back(ch);
      walk();
      b.pop_back();
    }
  };
  walk();
  return bad;
}

Outcome metric_oracles() {
  const auto t0 = Clock::now();
  std::ostringstream detail;
  bool ok = true;

  // edit distance: memo-free recursion on every pair with |a|+|b| <= 8, and
  // every pair with both lengths <= 8 against an incremental column oracle
  auto seqs = all_sequences(8, 3);
  std::size_t rec_pairs = 0, rec_bad = 0;
  for (const auto& a : seqs) {
    for (const auto& b : seqs) {
      if (a.size() + b.size() > 8) continue;
      ++rec_pairs;
      rec_bad += evalkit::edit_distance(a, b) != testsupport::edit_distance_recursive(a, 0, b, 0);
    }
  }
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const auto& a = seqs[rng.below(seqs.size())];
    const auto& b = seqs[rng.below(seqs.size())];
    ++rec_pairs;
    rec_bad += evalkit::edit_distance(a, b) != testsupport::edit_distance_recursive(a, 0, b, 0);
  }
  std::size_t sweep_pairs = 0, sweep_bad = 0;
  for (const auto& a : seqs) sweep_bad += edit_distance_trie_sweep(a, 8, 3, sweep_pairs);
  ok &= rec_bad == 0 && sweep_bad == 0;
  detail << "edit distance " << rec_pairs << " recursion pairs/" << rec_bad << " bad, " << sweep_pairs
         << " exhaustive pairs/" << sweep_bad << " bad; ";

  // BLEU against the textbook reference
  double bleu_worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    evalkit::Tokens c(rng.below(13)), r(1 + rng.below(12));
    for (auto& t : c) t = "t" + std::to_string(rng.below(4));
    for (auto& t : r) t = "t" + std::to_string(rng.below(4));
    bleu_worst = std::max(bleu_worst, std::abs(evalkit::bleu4(c, r) - testsupport::bleu_reference(c, r)));
  }
  evalkit::Tokens ref12;
  for (int i = 0; i < 12; ++i) ref12.push_back("w" + std::to_string(i));
  evalkit::Tokens half(ref12.begin(), ref12.begin() + 6);
  bleu_worst = std::max(bleu_worst, std::abs(evalkit::bleu4(half, ref12) - testsupport::bleu_reference(half, ref12)));
  ok &= bleu_worst <= 1e-9;
  detail << "BLEU max diff " << fmt("%.1e", bleu_worst) << " (<= 1e-9); ";

  // frequency baseline against the scan oracle
  std::size_t freq_bad = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<evalkit::Tokens> train(1 + rng.below(60)), test(rng.below(30));
    for (auto* set : {&train, &test}) {
      for (auto& t : *set) {
        t.resize(1 + rng.below(2));
        for (auto& w : t) w = std::string(1, static_cast<char>('a' + rng.below(3)));
      }
    }
    for (std::size_t k : {1u, 3u, 5u, 10u}) {
      freq_bad += evalkit::frequency_baseline(train, test, k) != testsupport::frequency_baseline_scan(train, test, k);
    }
  }
  ok &= freq_bad == 0;
  detail << "frequency baseline 100 corpora/" << freq_bad << " bad; ";

  // overlap fractions: numerators sum to the denominator exactly
  std::size_t overlap_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    std::set<std::string> r, a;
    const std::size_t n = 1 + rng.below(40);
    for (std::size_t k = 0; k < n; ++k) {
      if (rng.below(2)) r.insert(std::to_string(rng.below(50)));
      if (rng.below(2)) a.insert(std::to_string(rng.below(50)));
    }
    if (r.empty() && a.empty()) continue;
    auto rep = evalkit::overlap_metrics(r, a);
    std::set<std::string> u(r);
    u.insert(a.begin(), a.end());
    overlap_bad += rep.intersection_count + rep.raw_only_count + rep.abstract_only_count != u.size() ||
                   rep.union_count != u.size() || rep.empty_union;
  }
  ok &= overlap_bad == 0;
  detail << "overlap " << overlap_bad << " bad; " << fmt("%.1fs", seconds_since(t0));
  return {ok, detail.str()};
}

// 7 -------------------------------------------------------------------------

Outcome filter_contract() {
  testsupport::TempDir dir;
  for (const auto& f : testsupport::filter_fixture_files()) testsupport::write_text(dir / ("p1/" + f.path), f.text);
  miner::MiningStats stats;
  auto taps = miner::mine_corpus(dir.path(), {}, stats);
  auto r = miner::filter_taps(taps, testsupport::repeated_lexemes_vocab(taps)).report;
  const bool identity = r.kept + r.removed_long + r.removed_unknown + r.removed_duplicate == r.input_count;
  return {r.removed_long == 1 && r.removed_unknown == 1 && r.removed_duplicate == 1 && identity,
          "input " + std::to_string(r.input_count) + ", long " + std::to_string(r.removed_long) + ", unknown " +
              std::to_string(r.removed_unknown) + ", duplicate " + std::to_string(r.removed_duplicate) + ", kept " +
              std::to_string(r.kept) + ", identity " + (identity ? "holds" : "BROKEN")};
}

// 8 -------------------------------------------------------------------------

Outcome focal_heuristic() {
  auto extracted = miner::extract_methods(testsupport::focal_fixture_files(), "p");
  std::size_t matched = 0;
  std::string failures;
  const auto cases = testsupport::focal_cases();
  for (const auto& c : cases) {
    auto it = std::find_if(extracted.methods.begin(), extracted.methods.end(),
                           [&](const miner::MethodRecord& m) { return m.name == c.name; });
    if (it == extracted.methods.end()) {
      failures += " " + c.name + "(missing)";
      continue;
    }
    auto focal = miner::find_focal_method(*it, extracted.methods);
    const bool ok = c.signature ? focal && focal->signature == *c.signature && focal->file == c.file : !focal;
    if (ok) {
      ++matched;
    } else {
      failures += " " + c.name;
    }
  }
  return {matched == cases.size() && cases.size() == 10,
          std::to_string(matched) + "/" + std::to_string(cases.size()) + " cases match" + failures};
}

// 9 -------------------------------------------------------------------------

std::map<std::string, std::string> artifacts(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root).generic_string();
    auto text = testsupport::read_text(e.path());
    if (rel.rfind("history-", 0) == 0) {
      // wall-clock seconds are the one column allowed to differ
      std::string kept, line;
      std::istringstream in(text);
      while (std::getline(in, line)) kept += line.substr(0, line.rfind(',')) + "\n";
      text = kept;
    }
    out[rel] = text;
  }
  return out;
}

std::map<std::string, std::string> full_run(const fs::path& root) {
  testsupport::write_synthetic_corpus(root / "corpus", 3, 20, 7);
  pipeline::PipelineConfig c;
  c.corpus_dir = root / "corpus";
  c.output_dir = root / "out";
  c.embed_dim = 16;
  c.hidden = 16;
  c.epochs = 5;
  c.patience = 5;
  c.batch_size = 4;
  c.learning_rate = 5e-3;
  c.beam_sizes = {5};
  c.max_decode_len = 20;
  c.seed = 42;
  pipeline::cmd_mine(c);
  pipeline::cmd_abstract(c, std::nullopt);
  for (auto mode : {pipeline::Mode::RawCopy, pipeline::Mode::Abstract}) {
    c.mode = mode;
    pipeline::cmd_train(c, {});
    pipeline::cmd_infer(c, {});
    pipeline::cmd_eval(c, {});
  }
  pipeline::EvalOptions both;
  both.predictions = c.output_dir / "predictions-raw_copy.jsonl";
  both.abstract_predictions = c.output_dir / "predictions-abstract.jsonl";
  c.mode = pipeline::Mode::RawCopy;
  pipeline::cmd_eval(c, both);
  return artifacts(c.output_dir);
}

Outcome determinism() {
  testsupport::TempDir a, b;
  auto first = full_run(a.path());
  auto second = full_run(b.path());
  std::string differing;
  for (const auto& [name, text] : first) {
    auto it = second.find(name);
    if (it == second.end() || it->second != text) differing += " " + name;
  }
  if (first.size() != second.size()) differing += " (file sets differ)";
  return {differing.empty() && !first.empty(),
          std::to_string(first.size()) + " artifacts compared" + (differing.empty() ? ", all identical" : ", differ:" + differing)};
}

// 10 ------------------------------------------------------------------------

Outcome timing() {
  testsupport::TempDir dir;
  testsupport::write_synthetic_corpus(dir / "corpus", 2, 20, 9);
  pipeline::PipelineConfig c;
  c.corpus_dir = dir / "corpus";
  c.output_dir = dir / "out";
  c.embed_dim = 16;
  c.hidden = 32;
  c.epochs = 1;
  c.batch_size = 8;
  c.max_decode_len = 24;
  pipeline::cmd_mine(c);
  pipeline::cmd_train(c, {});
  pipeline::InferOptions o;
  o.timing = true;
  pipeline::cmd_infer(c, o);
  auto j = nlohmann::json::parse(testsupport::read_text(dir / "out/timing-raw_copy.json"));
  std::ostringstream detail;
  std::map<std::size_t, double> per_k;
  for (const auto& [k, s] : j["seconds_per_input"].items()) per_k[std::stoul(k)] = s.get<double>();
  std::vector<std::size_t> ks;
  for (const auto& [k, s] : per_k) {
    ks.push_back(k);
    detail << "k=" << k << ":" << fmt("%.4f", s) << " ";
  }
  const bool complete = ks == evalkit::default_beam_sizes();
  const bool monotone = j["monotone"].get<bool>();
  detail << "s/input; noise " << fmt("%.1f%%", 100.0 * j["repeat_noise"].get<double>());
  if (!monotone) detail << "; WARNING: not monotone in k (soft check)";
  return {complete, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"abstraction round trip", abstraction_round_trip},
      {"gradient check", gradient_check},
      {"probability closure", probability_closure},
      {"beam correctness", beam_correctness},
      {"memorization", memorization},
      {"metric oracles", metric_oracles},
      {"filter contract", filter_contract},
      {"focal heuristic", focal_heuristic},
      {"determinism", determinism},
      {"timing harness", timing},
  };
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoul(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected.empty() && !selected.count(i + 1)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%zu] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
