#pragma once

// Mining Test-Assert Pairs (TAPs) out of a local Java corpus.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "assertgen/jlex.hpp"

namespace assertgen {
class Vocabulary;
}

namespace assertgen::miner {

inline constexpr std::string_view kPlaceholder = "AssertPlaceHolder";

/// The eight JUnit-4 assert names.
const std::vector<std::string>& assert_names();

/// One declared method. `tokens` covers modifiers through the closing brace
/// of the body; annotations are kept separately.
struct MethodRecord {
  std::string signature;  // name(Type1,Type2)
  std::string name;
  std::size_t arity = 0;
  std::vector<std::string> annotations;
  jlex::TokenStream tokens;
  bool is_test = false;
  std::string project_id;
  std::string file;
  std::size_t decl_index = 0;  // position within its file
};

struct TapRecord {
  std::vector<std::string> context_tokens;
  std::vector<std::string> target_tokens;
  std::optional<std::string> focal_signature;
  std::string id;

  bool operator==(const TapRecord&) const = default;
};

/// Stable 16-hex-digit id over (context, target).
std::string tap_id(const std::vector<std::string>& context, const std::vector<std::string>& target);

struct FilterReport {
  std::size_t input_count = 0;
  std::size_t removed_long = 0;
  std::size_t removed_unknown = 0;
  std::size_t removed_duplicate = 0;
  std::size_t kept = 0;

  bool balanced() const {
    return input_count == removed_long + removed_unknown + removed_duplicate + kept;
  }
};

/// True iff a <dependency> declares junit:junit with a version starting "4.".
bool scan_pom(std::string_view pom_text);

struct SourceFile {
  std::string path;  // relative to the project root
  std::string text;
};

struct ExtractionResult {
  std::vector<MethodRecord> methods;
  std::vector<std::string> skipped_files;  // "path: reason"
};

/// Extracts every method with a body from the given files. Files that fail to
/// lex are skipped and listed, never fatal.
ExtractionResult extract_methods(const std::vector<SourceFile>& files, const std::string& project_id);

/// Methods declared in one token stream (exposed for tests).
std::vector<MethodRecord> extract_from_tokens(const jlex::TokenStream& tokens, const std::string& file,
                                              const std::string& project_id);

/// Token span [begin, end) of an assert call, from its (possibly qualified)
/// name through the matching close parenthesis.
struct AssertSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string name;
};

std::vector<AssertSpan> find_asserts(const jlex::TokenStream& tokens);

/// Focal method heuristic: pool-matching call inside the assert arguments,
/// else the last pool-matching call before the assert. Match on name+arity.
std::optional<MethodRecord> find_focal_method(const MethodRecord& test,
                                              const std::vector<MethodRecord>& pool);

class TapError : public std::runtime_error {
 public:
  enum class Kind { NoAssert, MultipleAsserts };
  explicit TapError(Kind kind)
      : std::runtime_error(kind == Kind::NoAssert ? "no assert" : "multiple asserts"), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Throws TapError when the test does not have exactly one assert.
TapRecord assemble_tap(const MethodRecord& test, const std::optional<MethodRecord>& focal);

/// Inverse of the placeholder substitution: drops the appended focal tokens
/// and puts the target back in place of the placeholder.
std::vector<std::string> restore_test_tokens(const TapRecord& tap, std::size_t focal_token_count);

struct FilterResult {
  std::vector<TapRecord> kept;
  FilterReport report;
};

FilterResult filter_taps(const std::vector<TapRecord>& taps, const Vocabulary& vocab,
                         std::size_t max_context_tokens = 1000);

struct Split {
  std::vector<TapRecord> train;
  std::vector<TapRecord> validation;
  std::vector<TapRecord> test;
};

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

/// Deterministic shuffled partition. Throws InputError on an empty dataset or
/// ratios that do not sum to one.
Split split_dataset(const std::vector<TapRecord>& taps, SplitRatios ratios, std::uint64_t seed);

struct MiningStats {
  std::size_t projects = 0;
  std::size_t projects_skipped = 0;
  std::size_t files = 0;
  std::size_t files_skipped = 0;
  std::size_t test_methods = 0;
  std::size_t no_assert = 0;
  std::size_t multiple_asserts = 0;
  std::size_t with_focal = 0;
};

struct CorpusOptions {
  bool require_junit4 = false;
};

/// Walks a corpus directory (one sub-directory per project; a directory with
/// no sub-directories is itself one project) and assembles TAPs in sorted
/// project/file order.
std::vector<TapRecord> mine_corpus(const std::filesystem::path& corpus_dir, const CorpusOptions& options,
                                   MiningStats& stats);

}  // namespace assertgen::miner
