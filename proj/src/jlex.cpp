#include "assertgen/jlex.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <unordered_set>

namespace assertgen::jlex {
namespace {

constexpr std::array<std::string_view, 15> kCategoryNames = {
    "KEYWORD",    "IDENT",     "METHOD",     "TYPE_NAME", "ANNOTATION",
    "INT_LIT",    "LONG_LIT",  "FLOAT_LIT",  "DOUBLE_LIT", "CHAR_LIT",
    "STRING_LIT", "BOOL_LIT",  "NULL_LIT",   "OPERATOR",  "SEPARATOR",
};

const std::unordered_set<std::string_view>& keywords() {
  static const std::unordered_set<std::string_view> set = {
      "abstract", "assert",     "boolean",   "break",      "byte",      "case",
      "catch",    "char",       "class",     "const",      "continue",  "default",
      "do",       "double",     "else",      "enum",       "extends",   "final",
      "finally",  "float",      "for",       "goto",       "if",        "implements",
      "import",   "instanceof", "int",       "interface",  "long",      "native",
      "new",      "package",    "private",   "protected",  "public",    "return",
      "short",    "static",     "strictfp",  "super",      "switch",    "synchronized",
      "this",     "throw",      "throws",    "transient",  "try",       "void",
      "volatile", "while"};
  return set;
}

// Longest first so the scanner can take the first prefix match.
constexpr std::array<std::string_view, 47> kPunctuation = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==",
    "!=",   "<=",  ">=",  "+=",  "-=",  "*=", "/=", "&=", "|=", "^=", "%=", "<<",
    ">>",   "(",   ")",   "{",   "}",   "[",  "]",  ";",  ",",  ".",  "@",  "=",
    ">",    "<",   "!",   "~",   "?",   ":",  "+",  "-",  "*",  "/",  "&"};
constexpr std::array<std::string_view, 3> kPunctuationTail = {"|", "^", "%"};

bool is_separator(std::string_view s) {
  return s == "(" || s == ")" || s == "{" || s == "}" || s == "[" || s == "]" ||
         s == ";" || s == "," || s == "." || s == "..." || s == "@" || s == "::";
}

bool ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}
bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

Category number_category(std::string_view s) {
  char last = s.back();
  bool hex = s.size() > 1 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
  bool bin = s.size() > 1 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B');
  if (last == 'l' || last == 'L') return Category::LONG_LIT;
  if (bin) return Category::INT_LIT;
  if (hex) {
    bool hex_float = s.find_first_of("pP") != std::string_view::npos;
    if (!hex_float) return Category::INT_LIT;
    return (last == 'f' || last == 'F') ? Category::FLOAT_LIT : Category::DOUBLE_LIT;
  }
  if (last == 'f' || last == 'F') return Category::FLOAT_LIT;
  if (last == 'd' || last == 'D') return Category::DOUBLE_LIT;
  if (s.find_first_of(".eE") != std::string_view::npos) return Category::DOUBLE_LIT;
  return Category::INT_LIT;
}

// Category of a lexeme without context; identifiers come back as IDENT.
Category base_category(std::string_view s) {
  unsigned char c0 = static_cast<unsigned char>(s[0]);
  if (c0 == '"') return Category::STRING_LIT;
  if (c0 == '\'') return Category::CHAR_LIT;
  if (c0 == '@') return s.size() > 1 ? Category::ANNOTATION : Category::SEPARATOR;
  if (std::isdigit(c0) || (c0 == '.' && s.size() > 1 && is_digit(s[1]))) {
    return number_category(s);
  }
  if (ident_start(c0)) {
    if (s == "true" || s == "false") return Category::BOOL_LIT;
    if (s == "null") return Category::NULL_LIT;
    if (keywords().contains(s)) return Category::KEYWORD;
    return Category::IDENT;
  }
  return is_separator(s) ? Category::SEPARATOR : Category::OPERATOR;
}

bool is_upper_initial(std::string_view s) {
  return std::isupper(static_cast<unsigned char>(s[0])) != 0;
}

class Scanner {
 public:
  explicit Scanner(std::string_view src) : src_(src) {}

  TokenStream run() {
    TokenStream out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      int line = line_;
      int col = col_;
      std::size_t start = pos_;
      scan_token(line, col);
      out.push_back(JavaToken{std::string(src_.substr(start, pos_ - start)),
                              Category::IDENT, line, col});
    }
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    unsigned char c = static_cast<unsigned char>(src_[pos_++]);
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((c & 0xC0) != 0x80) {
      // Columns count code points, not UTF-8 continuation bytes.
      ++col_;
    }
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        int line = line_;
        int col = col_;
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) {
          throw LexError(LexError::Kind::UnterminatedLiteral, line, col);
        }
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  void scan_quoted(char quote, int line, int col) {
    advance();
    while (true) {
      if (pos_ >= src_.size() || peek() == '\n' || peek() == '\r') {
        throw LexError(LexError::Kind::UnterminatedLiteral, line, col);
      }
      char c = peek();
      advance();
      if (c == '\\') {
        if (pos_ >= src_.size()) throw LexError(LexError::Kind::UnterminatedLiteral, line, col);
        advance();
      } else if (c == quote) {
        return;
      }
    }
  }

  void scan_digits(bool hex) {
    while (pos_ < src_.size()) {
      char c = peek();
      if (is_digit(c) || c == '_' || (hex && std::isxdigit(static_cast<unsigned char>(c)))) {
        advance();
      } else {
        break;
      }
    }
  }

  void scan_exponent(char e1, char e2) {
    if (peek() == e1 || peek() == e2) {
      char sign = peek(1);
      if (is_digit(sign) || ((sign == '+' || sign == '-') && is_digit(peek(2)))) {
        advance();
        if (sign == '+' || sign == '-') advance();
        scan_digits(false);
      }
    }
  }

  void scan_number() {
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      scan_digits(true);
      if (peek() == '.') {
        advance();
        scan_digits(true);
      }
      scan_exponent('p', 'P');
    } else if (peek() == '0' && (peek(1) == 'b' || peek(1) == 'B')) {
      advance();
      advance();
      scan_digits(false);
    } else {
      scan_digits(false);
      if (peek() == '.' && is_digit(peek(1))) {
        advance();
        scan_digits(false);
      } else if (peek() == '.' && !ident_start(static_cast<unsigned char>(peek(1))) &&
                 peek(1) != '.') {
        advance();
      }
      scan_exponent('e', 'E');
    }
    char s = peek();
    if (s == 'l' || s == 'L' || s == 'f' || s == 'F' || s == 'd' || s == 'D') advance();
  }

  void scan_token(int line, int col) {
    unsigned char c = static_cast<unsigned char>(peek());
    if (c == '"' || c == '\'') {
      scan_quoted(static_cast<char>(c), line, col);
      return;
    }
    if (std::isdigit(c) || (c == '.' && is_digit(peek(1)))) {
      scan_number();
      return;
    }
    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(peek()))) advance();
      return;
    }
    if (c == '@' && ident_start(static_cast<unsigned char>(peek(1)))) {
      advance();
      while (true) {
        while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(peek()))) advance();
        if (peek() == '.' && ident_start(static_cast<unsigned char>(peek(1)))) {
          advance();
        } else {
          break;
        }
      }
      return;
    }
    std::string_view rest = src_.substr(pos_);
    auto match = [&](auto& table) -> std::size_t {
      for (std::string_view p : table) {
        if (rest.starts_with(p)) return p.size();
      }
      return 0;
    };
    std::size_t n = match(kPunctuation);
    if (n == 0) n = match(kPunctuationTail);
    if (n == 0) throw LexError(LexError::Kind::IllegalCharacter, line, col);
    for (std::size_t i = 0; i < n; ++i) advance();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::string_view category_name(Category c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<Category> category_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

bool is_abstractable(Category c) {
  return c != Category::KEYWORD && c != Category::OPERATOR && c != Category::SEPARATOR;
}

bool is_keyword(std::string_view word) { return keywords().contains(word); }

LexError::LexError(Kind kind, int line, int col)
    : std::runtime_error(std::string(kind == Kind::UnterminatedLiteral ? "unterminated literal"
                                                                      : "illegal character") +
                         " at " + std::to_string(line) + ":" + std::to_string(col)),
      kind_(kind),
      line_(line),
      col_(col) {}

void classify_in_place(TokenStream& tokens) {
  const std::size_t n = tokens.size();
  std::vector<Category> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = base_category(tokens[i].lexeme);

  auto lex_at = [&](std::ptrdiff_t i) -> std::string_view {
    if (i < 0 || static_cast<std::size_t>(i) >= n) return {};
    return tokens[static_cast<std::size_t>(i)].lexeme;
  };
  auto ident_at = [&](std::ptrdiff_t i) {
    return i >= 0 && static_cast<std::size_t>(i) < n &&
           base[static_cast<std::size_t>(i)] == Category::IDENT;
  };
  auto literal_at = [&](std::ptrdiff_t i) {
    if (i < 0 || static_cast<std::size_t>(i) >= n) return false;
    Category c = base[static_cast<std::size_t>(i)];
    return c >= Category::INT_LIT && c <= Category::NULL_LIT;
  };

  for (std::size_t u = 0; u < n; ++u) {
    if (base[u] != Category::IDENT) {
      tokens[u].category = base[u];
      continue;
    }
    auto i = static_cast<std::ptrdiff_t>(u);
    std::string_view prev = lex_at(i - 1);
    std::string_view next = lex_at(i + 1);
    std::string_view word = tokens[u].lexeme;
    Category cat = Category::IDENT;

    if (prev == "new") {
      cat = Category::TYPE_NAME;
    } else if (next == "(") {
      cat = Category::METHOD;
    } else if (ident_at(i + 1) || next == "...") {
      // `String s`, `Foo... xs`
      cat = Category::TYPE_NAME;
    } else if (next == "[" && lex_at(i + 2) == "]") {
      cat = Category::TYPE_NAME;
    } else if (prev == "extends" || prev == "implements" || prev == "throws" ||
               prev == "instanceof") {
      cat = Category::TYPE_NAME;
    } else if (prev == "(" && next == ")") {
      // Cast: `( Foo ) x`, but not a call argument or a condition.
      std::string_view before = lex_at(i - 2);
      std::string_view after = lex_at(i + 2);
      bool operand_follows = ident_at(i + 2) || literal_at(i + 2) || after == "(" ||
                             after == "new" || after == "this" || after == "super";
      bool call_or_condition = ident_at(i - 2) || before == "if" || before == "while" ||
                               before == "for" || before == "switch" || before == "catch" ||
                               before == "synchronized";
      if (operand_follows && !call_or_condition) cat = Category::TYPE_NAME;
    } else if (is_upper_initial(word)) {
      // Generic arguments; the upper-case initial keeps `a < b` comparisons out.
      bool opens = next == "<";
      bool inside = (prev == "<" || prev == ",") &&
                    (next == ">" || next == ">>" || next == ">>>" || next == "," || next == "[");
      if (opens || inside) cat = Category::TYPE_NAME;
    }
    tokens[u].category = cat;
  }
}

TokenStream classify(const std::vector<std::string>& lexeme_seq) {
  TokenStream out;
  out.reserve(lexeme_seq.size());
  int col = 1;
  for (const auto& l : lexeme_seq) {
    out.push_back(JavaToken{l, Category::IDENT, 1, col});
    col += static_cast<int>(l.size()) + 1;
  }
  classify_in_place(out);
  return out;
}

TokenStream lex(std::string_view source) {
  TokenStream tokens = Scanner(source).run();
  classify_in_place(tokens);
  return tokens;
}

std::vector<std::string> lexemes(const TokenStream& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.lexeme);
  return out;
}

std::vector<std::string> split_lexemes(std::string_view joined) {
  return lexemes(Scanner(joined).run());
}

}  // namespace assertgen::jlex
