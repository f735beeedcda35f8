#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace prs {

enum class TokenKind {
  Ident,
  Keyword,
  Number,
  String,
  LParen,
  RParen,
  Comma,
  Colon,
  Plus,
  Minus,
  Equals,
  Newline,  // declaration terminator; suppressed inside parens / after comma
  End
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  double number = 0.0;
  int line = 1, col = 1;
};

bool is_keyword(std::string_view word);

// Splits source text into tokens. Newlines inside parentheses or directly
// after a comma are continuations, not terminators; `#` starts a comment.
std::vector<Token> tokenize(std::string_view text);

}  // namespace prs
