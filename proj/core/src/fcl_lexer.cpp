#include "fcl_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace fuzzkit::fcl {
namespace {

constexpr std::array kReserved = {
    "FUNCTION_BLOCK", "END_FUNCTION_BLOCK", "VAR_INPUT", "VAR_OUTPUT", "VAR", "END_VAR",
    "REAL",           "FUZZIFY",            "END_FUZZIFY", "DEFUZZIFY", "END_DEFUZZIFY",
    "RULEBLOCK",      "END_RULEBLOCK",      "TERM",      "RANGE",      "METHOD",
    "DEFAULT",        "RULE",               "IF",        "THEN",       "IS",
    "AND",            "OR",                 "NOT",       "WITH",       "ACT",
    "ACCU",           "OPTIONS",            "END_OPTIONS",
};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) {
        out.push_back(Token{TokenKind::End, {}, 0.0, SourceSpan{line_, col_, 0}});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      if (peek() == '(' && peek(1) == '*') {
        advance();
        advance();
        while (!(peek() == '*' && peek(1) == ')')) {
          if (pos_ >= src_.size()) {
            syntax_error(SourceSpan{line_, col_, 0}, "'*)' closing the comment", "end of input");
          }
          advance();
        }
        advance();
        advance();
        continue;
      }
      if (peek() == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      return;
    }
  }

  Token make(TokenKind kind, std::size_t start, std::size_t line, std::size_t col) {
    Token t;
    t.kind = kind;
    t.text = src_.substr(start, pos_ - start);
    t.span = SourceSpan{line, col, pos_ - start};
    return t;
  }

  Token next() {
    const std::size_t start = pos_;
    const std::size_t line = line_;
    const std::size_t col = col_;
    const char c = peek();

    if (is_ident_start(c)) {
      while (is_ident_char(peek())) advance();
      return make(TokenKind::Identifier, start, line, col);
    }
    const bool signed_number =
        (c == '+' || c == '-') && (is_digit(peek(1)) || (peek(1) == '.' && is_digit(peek(2))));
    if (is_digit(c) || (c == '.' && is_digit(peek(1))) || signed_number) {
      return number(start, line, col);
    }
    switch (c) {
      case ':':
        advance();
        if (peek() == '=') {
          advance();
          return make(TokenKind::Assign, start, line, col);
        }
        return make(TokenKind::Colon, start, line, col);
      case ';': advance(); return make(TokenKind::Semicolon, start, line, col);
      case ',': advance(); return make(TokenKind::Comma, start, line, col);
      case '(': advance(); return make(TokenKind::LParen, start, line, col);
      case ')': advance(); return make(TokenKind::RParen, start, line, col);
      case '.':
        if (peek(1) == '.') {
          advance();
          advance();
          return make(TokenKind::DotDot, start, line, col);
        }
        break;
      default: break;
    }
    std::string found = "character '";
    if (std::isprint(static_cast<unsigned char>(c))) {
      found += c;
    } else {
      constexpr char hex[] = "0123456789abcdef";
      const auto byte = static_cast<unsigned char>(c);
      found += "\\x";
      found += hex[byte >> 4];
      found += hex[byte & 0xF];
    }
    found += "'";
    syntax_error(SourceSpan{line, col, 1}, "a token", found);
  }

  Token number(std::size_t start, std::size_t line, std::size_t col) {
    if (peek() == '+' || peek() == '-') advance();
    while (is_digit(peek())) advance();
    // A '.' only belongs to the number when a digit follows, so "0..60"
    // lexes as 0, .., 60.
    if (peek() == '.' && is_digit(peek(1))) {
      advance();
      while (is_digit(peek())) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      const bool exp_sign = peek(1) == '+' || peek(1) == '-';
      const char first = exp_sign ? peek(2) : peek(1);
      if (is_digit(first)) {
        advance();
        if (exp_sign) advance();
        while (is_digit(peek())) advance();
      }
    }
    Token t = make(TokenKind::Number, start, line, col);
    std::string_view digits = t.text;
    if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.number);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      syntax_error(t.span, "a finite number", "'" + std::string(t.text) + "'");
    }
    if (is_ident_start(peek())) {
      syntax_error(SourceSpan{line_, col_, 1}, "a separator after the number",
                   "character '" + std::string(1, peek()) + "'");
    }
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::string describe(const Token& token) {
  switch (token.kind) {
    case TokenKind::End: return "end of input";
    case TokenKind::Identifier:
      return (is_reserved(token.text) ? "keyword '" : "identifier '") + std::string(token.text) +
             "'";
    case TokenKind::Number: return "number " + std::string(token.text);
    default: return "'" + std::string(token.text) + "'";
  }
}

bool iequals(std::string_view a, std::string_view b) noexcept {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) ==
                  std::toupper(static_cast<unsigned char>(y));
         });
}

bool is_reserved(std::string_view word) noexcept {
  return std::any_of(kReserved.begin(), kReserved.end(),
                     [&](const char* kw) { return iequals(word, kw); });
}

bool is_identifier(std::string_view word) noexcept {
  if (word.empty() || !is_ident_start(word.front())) return false;
  if (!std::all_of(word.begin(), word.end(), is_ident_char)) return false;
  return !is_reserved(word);
}

void syntax_error(SourceSpan span, std::string expected, std::string found) {
  FclDiagnostic d;
  d.code = FclErrorCode::Syntax;
  d.span = span;
  d.expected = std::move(expected);
  d.found = std::move(found);
  throw FclError({std::move(d)});
}

}  // namespace fuzzkit::fcl
