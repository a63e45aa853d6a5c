#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "assertgen/abstractor.hpp"
#include "assertgen/errors.hpp"
#include "assertgen/evalkit.hpp"
#include "assertgen/jlex.hpp"
#include "assertgen/miner.hpp"

namespace py = pybind11;
using namespace assertgen;

namespace {

using Tokens = std::vector<std::string>;

py::dict tap_to_dict(const miner::TapRecord& tap) {
  py::dict d;
  d["id"] = tap.id;
  d["context_tokens"] = tap.context_tokens;
  d["target_tokens"] = tap.target_tokens;
  d["focal_signature"] = tap.focal_signature ? py::cast(*tap.focal_signature) : py::none();
  return d;
}

Vocabulary idiom_vocab(const Tokens& idioms) {
  std::vector<Vocabulary::Entry> entries;
  entries.reserve(idioms.size());
  for (const auto& lexeme : idioms) entries.push_back({lexeme, 1});
  return Vocabulary(std::move(entries), idioms.size());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the assertgen core library";

  auto base = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IntegrityError>(m, "IntegrityError", PyExc_ValueError);
  py::register_exception<jlex::LexError>(m, "LexError", base.ptr());

  m.def(
      "lex",
      [](std::string_view source) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& t : jlex::lex(source)) out.emplace_back(t.lexeme, std::string(jlex::category_name(t.category)));
        return out;
      },
      py::arg("source"), "Lexes Java source into (lexeme, category) pairs.");
  m.def("split_lexemes", &jlex::split_lexemes, py::arg("joined"));
  m.def("tap_id", &miner::tap_id, py::arg("context"), py::arg("target"));

  m.def(
      "mine",
      [](const std::filesystem::path& corpus, bool require_junit4) {
        miner::CorpusOptions options;
        options.require_junit4 = require_junit4;
        miner::MiningStats stats;
        auto taps = miner::mine_corpus(corpus, options, stats);
        py::list out;
        for (const auto& tap : taps) out.append(tap_to_dict(tap));
        return out;
      },
      py::arg("corpus"), py::arg("require_junit4") = false, "Mines test-assert pairs from a corpus directory.");

  m.def(
      "abstract",
      [](const Tokens& context, const Tokens& target, const Tokens& idioms) {
        miner::TapRecord tap;
        tap.context_tokens = context;
        tap.target_tokens = target;
        auto a = abstractor::abstract_tap(tap, idiom_vocab(idioms));
        return py::make_tuple(a.context_tokens, a.target_tokens, a.map.forward);
      },
      py::arg("context"), py::arg("target"), py::arg("idioms") = Tokens{},
      "Returns (context, target, mapping) with identifiers and literals replaced by typed IDs.");
  m.def(
      "unabstract",
      [](const Tokens& tokens, std::map<std::string, std::string> forward) {
        auto r = abstractor::unabstract(tokens, abstractor::map_from_forward(std::move(forward)));
        return py::make_tuple(r.tokens, r.unresolved);
      },
      py::arg("tokens"), py::arg("mapping"));

  m.def("bleu4", &evalkit::bleu4, py::arg("candidate"), py::arg("reference"));
  m.def("edit_distance", &evalkit::edit_distance, py::arg("a"), py::arg("b"));
  m.def("classify_assert", &evalkit::classify_assert, py::arg("gold"));
}
