#pragma once

// Helpers shared by the unit tests and the acceptance runner: temp
// directories, toy models, synthetic TAP generators and small oracles.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unistd.h>
#include <vector>

#include "assertgen/abstractor.hpp"
#include "assertgen/miner.hpp"
#include "assertgen/neural/model.hpp"
#include "assertgen/util.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using namespace assertgen;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("assertgen-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline const char* kJunit4Pom =
    "<project><dependencies><dependency><groupId>junit</groupId><artifactId>junit</artifactId>"
    "<version>4.12</version></dependency></dependencies></project>\n";

// ---------------------------------------------------------------------------
// Toy neural models

inline neural::Hyperparams toy_hp(std::size_t vocab, std::size_t d, std::size_t h, bool copy,
                                  neural::AttentionKind att = neural::AttentionKind::Additive) {
  neural::Hyperparams hp;
  hp.vocab_size = vocab;
  hp.embed_dim = d;
  hp.hidden = h;
  hp.copy_enabled = copy;
  hp.attention = att;
  hp.dropout = 0.2;
  return hp;
}

/// Vocabulary of `size` ids: the four reserved tokens plus w0, w1, ...
inline neural::ModelVocab toy_vocab(std::size_t size) {
  std::vector<std::string> words;
  for (std::size_t i = neural::kReservedIds; i < size; ++i) words.push_back("w" + std::to_string(i - neural::kReservedIds));
  return neural::ModelVocab(words);
}

/// Random input of length in [1, max_len]. With `oov_rate` > 0 some positions
/// use lexemes outside the toy vocabulary (o0, o1, ...).
inline std::vector<std::string> random_lexemes(Rng& rng, std::size_t vocab_size, std::size_t max_len,
                                               double oov_rate) {
  const std::size_t n = 1 + rng.below(max_len);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < oov_rate) {
      out.push_back("o" + std::to_string(rng.below(3)));
    } else {
      out.push_back("w" + std::to_string(rng.below(vocab_size - neural::kReservedIds)));
    }
  }
  return out;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  // tensor[index] with the largest error
  std::size_t checked = 0;
};

/// Analytic gradients of the (dropout-free) loss against central finite
/// differences, over every element of every parameter tensor. The relative
/// error is |a - n| / max(|a|, |n|, floor).
inline GradCheckResult gradient_check(neural::Seq2Seq& model, const neural::Example& ex, double eps = 1e-5,
                                      double floor = 1e-6) {
  auto& params = model.params();
  params.zero_grad();
  {
    neural::Tape tape;
    auto l = model.loss(tape, ex, neural::Mode::Infer, nullptr);
    tape.backward(l);
  }
  GradCheckResult r;
  for (auto& [name, t] : params.named()) {
    const std::vector<double> analytic = t->grad;
    for (std::size_t i = 0; i < t->size(); ++i) {
      const double v = t->values[i];
      t->values[i] = v + eps;
      const double up = model.evaluate_loss(ex);
      t->values[i] = v - eps;
      const double down = model.evaluate_loss(ex);
      t->values[i] = v;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      if (rel > r.max_rel_error) {
        r.max_rel_error = rel;
        r.worst = name + "[" + std::to_string(i) + "]";
      }
      ++r.checked;
    }
  }
  return r;
}

inline neural::Example random_example(Rng& rng, const neural::ModelVocab& vocab, std::size_t max_len, bool copy) {
  auto input = random_lexemes(rng, vocab.size(), max_len, copy ? 0.3 : 0.0);
  std::vector<std::string> target;
  const std::size_t m = 1 + rng.below(3);
  for (std::size_t i = 0; i < m; ++i) {
    // mix in-vocabulary tokens with copies from the input
    if (copy && rng.below(2) == 0) {
      target.push_back(input[rng.below(input.size())]);
    } else {
      target.push_back("w" + std::to_string(rng.below(vocab.size() - neural::kReservedIds)));
    }
  }
  neural::Example ex;
  ex.input = neural::encode_input(vocab, input);
  ex.target = neural::encode_target(vocab, ex.input, target, copy);
  return ex;
}

/// Hand-set step model over three output ids {0 = stop, 1, 2}. Log-probs
/// depend on the previous token and the step index.
struct HandModel {
  using State = std::size_t;  // step index
  static constexpr std::size_t kStart = 3;

  State initial_state() { return 0; }

  std::pair<std::vector<double>, State> step(const State& t, std::size_t prev) {
    // rows: previous token (stop never feeds back, start = 3); columns: next id
    static const double table[3][4][3] = {
        {{0.0, 0.0, 0.0}, {0.10, 0.60, 0.30}, {0.30, 0.45, 0.25}, {0.05, 0.55, 0.40}},
        {{0.0, 0.0, 0.0}, {0.50, 0.15, 0.35}, {0.20, 0.70, 0.10}, {0.35, 0.40, 0.25}},
        {{0.0, 0.0, 0.0}, {0.32, 0.28, 0.40}, {0.55, 0.25, 0.20}, {0.15, 0.45, 0.40}},
    };
    const auto& row = table[std::min<std::size_t>(t, 2)][prev];
    return {{std::log(row[0]), std::log(row[1]), std::log(row[2])}, t + 1};
  }
};

/// Every sequence of at most `max_len` tokens that either ends at the first
/// stop or runs to max_len, with its summed log-probability, best first.
template <typename M>
std::vector<std::pair<std::vector<std::size_t>, double>> enumerate_sequences(M& model, std::size_t max_len,
                                                                             std::size_t start, std::size_t stop) {
  std::vector<std::pair<std::vector<std::size_t>, double>> out;
  std::function<void(std::vector<std::size_t>&, typename M::State, double)> walk =
      [&](std::vector<std::size_t>& prefix, typename M::State state, double lp) {
        if (prefix.size() == max_len || (!prefix.empty() && prefix.back() == stop)) {
          out.emplace_back(prefix, lp);
          return;
        }
        auto [logp, next] = model.step(state, prefix.empty() ? start : prefix.back());
        for (std::size_t w = 0; w < logp.size(); ++w) {
          if (!std::isfinite(logp[w])) continue;
          prefix.push_back(w);
          walk(prefix, next, lp + logp[w]);
          prefix.pop_back();
        }
      };
  std::vector<std::size_t> prefix;
  walk(prefix, model.initial_state(), 0.0);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic TAPs

/// Random Java-flavoured TAP, built from a small grammar so that every
/// lexer category shows up (including lexemes that look like typed IDs).
inline miner::TapRecord random_tap(Rng& rng) {
  static const std::vector<std::string> types = {"Foo", "Bar", "List", "Map", "Widget", "IDENT_0", "String"};
  static const std::vector<std::string> vars = {"a", "b", "value", "x1", "_tmp", "$v", "IDENT_2", "METHOD_0", "res"};
  static const std::vector<std::string> methods = {"get", "compute", "size", "isEmpty", "toString", "run", "TYPE_1"};
  auto pick = [&](const std::vector<std::string>& v) { return v[rng.below(v.size())]; };
  auto literal = [&]() -> std::string {
    switch (rng.below(8)) {
      case 0: return std::to_string(rng.below(1000));
      case 1: return std::to_string(rng.below(1000)) + "L";
      case 2: return std::to_string(rng.below(100)) + ".5f";
      case 3: return std::to_string(rng.below(100)) + ".25";
      case 4: return std::string("'") + static_cast<char>('a' + rng.below(26)) + "'";
      case 5: return "\"s" + std::to_string(rng.below(50)) + " t\"";
      case 6: return rng.below(2) ? "true" : "false";
      default: return "null";
    }
  };

  std::vector<std::string> ctx = {"@Test", "public", "void", "test" + std::to_string(rng.below(100)), "(", ")", "{"};
  const std::size_t statements = 1 + rng.below(6);
  for (std::size_t s = 0; s < statements; ++s) {
    switch (rng.below(3)) {
      case 0: {
        auto t = pick(types);
        ctx.insert(ctx.end(), {t, pick(vars), "=", "new", t, "(", literal(), ")", ";"});
        break;
      }
      case 1:
        ctx.insert(ctx.end(), {pick(vars), ".", pick(methods), "(", literal(), ",", pick(vars), ")", ";"});
        break;
      default:
        ctx.insert(ctx.end(), {"int", pick(vars), "=", pick(vars), "+", literal(), ";"});
        break;
    }
  }
  ctx.insert(ctx.end(), {std::string(miner::kPlaceholder), ";", "}"});

  std::vector<std::string> target;
  switch (rng.below(3)) {
    case 0:
      target = {"assertEquals", "(", literal(), ",", pick(vars), ".", pick(methods), "(", ")", ")"};
      break;
    case 1:
      target = {"assertTrue", "(", pick(vars), ".", pick(methods), "(", ")", ")"};
      break;
    default:
      target = {"Assert", ".", "assertNotNull", "(", pick(vars), ")"};
      break;
  }
  miner::TapRecord tap;
  tap.context_tokens = std::move(ctx);
  tap.target_tokens = std::move(target);
  tap.id = miner::tap_id(tap.context_tokens, tap.target_tokens);
  return tap;
}

/// Idiom set drawn at random from the lexemes of the given TAPs.
inline Vocabulary random_idioms(Rng& rng, const std::vector<miner::TapRecord>& taps, std::size_t capacity) {
  auto all = Vocabulary::build(taps, std::numeric_limits<std::size_t>::max());
  std::vector<Vocabulary::Entry> entries = all.entries();
  rng.shuffle(entries);
  if (entries.size() > capacity) entries.resize(capacity);
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.lexeme < b.lexeme;
  });
  return Vocabulary(std::move(entries), capacity);
}

// ---------------------------------------------------------------------------
// Focal-method fixture

struct FocalCase {
  std::string name;
  std::string body;  // statements of the test method
  std::optional<std::string> signature;
  std::string file;  // declaring file of the expected focal method
};

inline std::vector<FocalCase> focal_cases() {
  return {
      {"lastCallBeforeAssert", "s.reset(); s.compute(1); assertTrue(flag);", "compute(int)", "Service.java"},
      {"callInsideAssert", "assertEquals(5, s.getName());", "getName()", "Alpha.java"},
      {"noPoolMatch", "int v = Math.abs(3); assertEquals(3, v);", std::nullopt, ""},
      {"lastOfSeveral", "s.compute(1, 2); s.isReady(); assertTrue(x);", "isReady()", "Service.java"},
      {"outermostInsideAssert", "assertEquals(s.compute(s.size()), 4);", "compute(int)", "Service.java"},
      {"insideBeatsBefore", "s.compute(1); assertEquals(2, s.compute(1, 2));", "compute(int,int)", "Service.java"},
      {"outermostInLastStatement", "int a = s.compute(s.size()); assertTrue(a > 0);", "compute(int)", "Service.java"},
      {"skipsLibraryCalls", "s.reset(); foo.bar(); assertNotNull(x);", "reset()", "Service.java"},
      {"arityMismatch", "s.compute(1, 2, 3); assertTrue(ok);", std::nullopt, ""},
      {"callAfterAssertIgnored", "Service s = new Service(); assertTrue(ok); s.reset();", std::nullopt, ""},
  };
}

inline std::vector<miner::SourceFile> focal_fixture_files() {
  std::string test = "import org.junit.Test;\nimport static org.junit.Assert.*;\npublic class ServiceTest {\n";
  auto cases = focal_cases();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    test += "  @Test public void " + cases[i].name + "() { " + cases[i].body + " }\n";
  }
  test += "}\n";
  return {
      {"Service.java",
       "public class Service {\n"
       "  public int compute(int x) { return x; }\n"
       "  public int compute(int x, int y) { return x + y; }\n"
       "  public String getName() { return \"s\"; }\n"
       "  public void reset() { }\n"
       "  public boolean isReady() { return true; }\n"
       "  public int size() { return 0; }\n"
       "}\n"},
      {"Alpha.java", "public class Alpha {\n  public String getName() { return \"a\"; }\n}\n"},
      {"ServiceTest.java", test},
  };
}

// ---------------------------------------------------------------------------
// Filter fixture: one over-long test, one whose target holds a token seen
// nowhere else, one duplicate, and two ordinary tests.

inline std::vector<miner::SourceFile> filter_fixture_files() {
  std::string long_body;
  for (int i = 0; i < 260; ++i) long_body += "x = x + 1; ";
  auto test_class = [](const std::string& cls, const std::string& methods) {
    return "import org.junit.Test;\nimport static org.junit.Assert.*;\npublic class " + cls + " {\n" + methods +
           "}\n";
  };
  return {
      {"Calc.java",
       "public class Calc {\n  public int add(int a, int b) { return a + b; }\n"
       "  public int twice(int a) { return 2 * a; }\n}\n"},
      {"CalcTest.java",
       test_class("CalcTest",
                  "  @Test public void adds() { Calc c = new Calc(); int r = c.add(1, 2); assertEquals(3, r); }\n"
                  "  @Test public void doubles() { Calc c = new Calc(); int e = 4; assertEquals(e, c.twice(2)); }\n"
                  "  @Test public void longOne() { int x = 0; " + long_body + "assertEquals(260, x); }\n"
                  "  @Test public void unknown() { Calc c = new Calc(); assertEquals(zorblaxQuux, c.twice(2)); }\n")},
      {"CalcCopyTest.java",
       test_class("CalcCopyTest",
                  "  @Test public void adds() { Calc c = new Calc(); int r = c.add(1, 2); assertEquals(3, r); }\n")},
  };
}

/// Vocabulary holding every lexeme seen at least twice in `taps`.
inline Vocabulary repeated_lexemes_vocab(const std::vector<miner::TapRecord>& taps) {
  auto all = Vocabulary::build(taps, std::numeric_limits<std::size_t>::max());
  std::size_t cap = 0;
  for (const auto& e : all.entries()) cap += e.frequency >= 2 ? 1 : 0;
  return Vocabulary::build(taps, cap);
}

// ---------------------------------------------------------------------------
// Corpora on disk

/// Three small projects: alpha has two single-assert tests, beta one plus a
/// test without asserts, gamma one plus a test with two asserts. Mining
/// yields four TAPs.
inline void write_pipeline_fixture(const fs::path& root) {
  const std::string imports = "import org.junit.Test;\nimport static org.junit.Assert.*;\n";
  write_text(root / "alpha/pom.xml", kJunit4Pom);
  write_text(root / "alpha/src/main/java/Calc.java",
             "public class Calc {\n  public int add(int a, int b) { return a + b; }\n"
             "  public int twice(int a) { return 2 * a; }\n}\n");
  write_text(root / "alpha/src/test/java/CalcTest.java",
             imports + "public class CalcTest {\n"
                       "  @Test public void adds() { Calc c = new Calc(); int r = c.add(1, 2); assertEquals(3, r); }\n"
                       "  @Test public void doubles() { Calc c = new Calc(); assertEquals(4, c.twice(2)); }\n}\n");
  write_text(root / "beta/pom.xml", kJunit4Pom);
  write_text(root / "beta/src/main/java/Counter.java",
             "public class Counter {\n  private int n;\n  public void inc() { n = n + 1; }\n"
             "  public int get() { return n; }\n}\n");
  write_text(root / "beta/src/test/java/CounterTest.java",
             imports + "public class CounterTest {\n"
                       "  @Test public void counts() { Counter c = new Counter(); c.inc(); assertTrue(c.get() > 0); }\n"
                       "  @Test public void nothing() { Counter c = new Counter(); c.inc(); }\n}\n");
  write_text(root / "gamma/pom.xml", kJunit4Pom);
  write_text(root / "gamma/src/main/java/Greeter.java",
             "public class Greeter {\n  public String greet(String who) { return \"hi \" + who; }\n}\n");
  write_text(root / "gamma/src/test/java/GreeterTest.java",
             imports + "public class GreeterTest {\n"
                       "  @Test public void greets() { Greeter g = new Greeter(); String s = g.greet(\"bo\");"
                       " assertNotNull(s); }\n"
                       "  @Test public void twice() { Greeter g = new Greeter(); assertNotNull(g); "
                       "assertEquals(\"hi a\", g.greet(\"a\")); }\n}\n");
}

/// Generated projects whose tests follow a few fixed shapes over small
/// literals, so a toy model can fit them.
inline void write_synthetic_corpus(const fs::path& root, std::size_t projects, std::size_t tests_per_project,
                                   std::uint64_t seed) {
  Rng rng(seed);
  const std::string imports = "import org.junit.Test;\nimport static org.junit.Assert.*;\n";
  for (std::size_t p = 0; p < projects; ++p) {
    const std::string cls = "Box" + std::to_string(p);
    const fs::path dir = root / ("proj" + std::to_string(p));
    write_text(dir / "pom.xml", kJunit4Pom);
    write_text(dir / "src/main/java" / (cls + ".java"),
               "public class " + cls + " {\n  private int v;\n  public int get(int k) { return v + k; }\n"
               "  public boolean empty() { return v == 0; }\n  public String name() { return \"b\"; }\n}\n");
    std::string body;
    for (std::size_t t = 0; t < tests_per_project; ++t) {
      const std::string name = "t" + std::to_string(t);
      const std::string lit = std::to_string(rng.below(6));
      switch (rng.below(3)) {
        case 0:
          body += "  @Test public void " + name + "() { " + cls + " b = new " + cls + "(); int r = b.get(" + lit +
                  "); assertEquals(" + lit + ", r); }\n";
          break;
        case 1:
          body += "  @Test public void " + name + "() { " + cls + " b = new " + cls + "(); assertTrue(b.empty()); }\n";
          break;
        default:
          body += "  @Test public void " + name + "() { " + cls + " b = new " + cls + "(); String s = b.name(); " +
                  "assertNotNull(s); }\n";
          break;
      }
    }
    write_text(dir / "src/test/java" / (cls + "Test.java"),
               imports + "public class " + cls + "Test {\n" + body + "}\n");
  }
}

// ---------------------------------------------------------------------------
// Oracles

/// Plain recursive Levenshtein distance with no memo.
inline std::size_t edit_distance_recursive(const std::vector<std::string>& a, std::size_t i,
                                           const std::vector<std::string>& b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  const std::size_t sub = edit_distance_recursive(a, i + 1, b, j + 1) + (a[i] == b[j] ? 0 : 1);
  const std::size_t del = edit_distance_recursive(a, i + 1, b, j) + 1;
  const std::size_t ins = edit_distance_recursive(a, i, b, j + 1) + 1;
  return std::min({sub, del, ins});
}

/// Textbook sentence BLEU-4 with the same smoothing conventions, written
/// without the library's n-gram map.
inline double bleu_reference(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  if (cand.empty()) return 0.0;
  auto grams = [](const std::vector<std::string>& s, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      std::string g;
      for (std::size_t k = 0; k < n; ++k) g += s[i + k] + '\x1f';
      out.push_back(g);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const std::size_t orders = std::min<std::size_t>(4, cand.size());
  double sum_log = 0.0;
  for (std::size_t n = 1; n <= orders; ++n) {
    auto c = grams(cand, n);
    auto r = grams(ref, n);
    std::vector<std::string> common;
    std::set_intersection(c.begin(), c.end(), r.begin(), r.end(), std::back_inserter(common));
    const double total = static_cast<double>(c.size());
    const double m = static_cast<double>(common.size());
    if (m == 0.0 && n == 1) return 0.0;
    sum_log += std::log(m > 0.0 ? m / total : 1.0 / (total + 1.0));
  }
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return 100.0 * bp * std::exp(sum_log / static_cast<double>(orders));
}

/// Frequency baseline by direct scanning: repeatedly select the most frequent
/// remaining target (ties to the lexicographically smaller), then compare
/// every test target against each selection.
inline std::size_t frequency_baseline_scan(const std::vector<std::vector<std::string>>& train,
                                           const std::vector<std::vector<std::string>>& test, std::size_t k) {
  std::vector<std::vector<std::string>> chosen;
  for (std::size_t round = 0; round < k; ++round) {
    const std::vector<std::string>* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& cand : train) {
      if (std::find(chosen.begin(), chosen.end(), cand) != chosen.end()) continue;
      const auto count = static_cast<std::size_t>(std::count(train.begin(), train.end(), cand));
      if (!best || count > best_count || (count == best_count && cand < *best)) {
        best = &cand;
        best_count = count;
      }
    }
    if (!best) break;
    chosen.push_back(*best);
  }
  std::size_t hits = 0;
  for (const auto& t : test) {
    for (const auto& c : chosen) {
      if (c == t) {
        ++hits;
        break;
      }
    }
  }
  return hits;
}

}  // namespace testsupport
