#pragma once

// Java lexer: turns source text into categorized tokens. Classification is
// lexical with one-token lookahead; there is no parser behind it.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace assertgen::jlex {

enum class Category : std::uint8_t {
  KEYWORD,
  IDENT,
  METHOD,
  TYPE_NAME,
  ANNOTATION,
  INT_LIT,
  LONG_LIT,
  FLOAT_LIT,
  DOUBLE_LIT,
  CHAR_LIT,
  STRING_LIT,
  BOOL_LIT,
  NULL_LIT,
  OPERATOR,
  SEPARATOR,
};

std::string_view category_name(Category c);
std::optional<Category> category_from_name(std::string_view name);

/// True for categories that the abstractor replaces with typed IDs.
bool is_abstractable(Category c);

struct JavaToken {
  std::string lexeme;
  Category category = Category::IDENT;
  int line = 1;
  int col = 1;

  bool operator==(const JavaToken&) const = default;
};

using TokenStream = std::vector<JavaToken>;

class LexError : public std::runtime_error {
 public:
  enum class Kind { UnterminatedLiteral, IllegalCharacter };
  LexError(Kind kind, int line, int col);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  Kind kind_;
  int line_;
  int col_;
};

/// Scans and classifies. Comments and whitespace are dropped.
/// Throws LexError on an unterminated literal or an illegal character.
TokenStream lex(std::string_view source);

/// Assigns categories to an already-scanned lexeme sequence. Positions are
/// synthesized as if the lexemes were joined by single spaces on one line.
TokenStream classify(const std::vector<std::string>& lexemes);

/// Same as above but keeps caller-provided positions.
void classify_in_place(TokenStream& tokens);

std::vector<std::string> lexemes(const TokenStream& tokens);

/// Splits a space-joined lexeme string back into lexemes by re-lexing it.
std::vector<std::string> split_lexemes(std::string_view joined);

bool is_keyword(std::string_view word);

}  // namespace assertgen::jlex
