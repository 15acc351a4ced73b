#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fuzzkit/fcl.hpp"

namespace fuzzkit::fcl {

enum class TokenKind {
  Identifier,
  Number,
  Assign,     // :=
  Colon,      // :
  Semicolon,  // ;
  Comma,      // ,
  LParen,     // (
  RParen,     // )
  DotDot,     // ..
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string_view text;
  double number = 0.0;
  SourceSpan span;
};

/// Splits FCL source into tokens, skipping whitespace, (* block *) and
/// // line comments. The final token is always End. Throws FclError on
/// the first lexical error.
std::vector<Token> tokenize(std::string_view source);

std::string describe(const Token& token);

bool is_reserved(std::string_view word) noexcept;
bool iequals(std::string_view a, std::string_view b) noexcept;

/// [A-Za-z_][A-Za-z0-9_]* and not reserved.
bool is_identifier(std::string_view word) noexcept;

[[noreturn]] void syntax_error(SourceSpan span, std::string expected, std::string found);

}  // namespace fuzzkit::fcl
