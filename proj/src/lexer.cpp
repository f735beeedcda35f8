#include "prs/lexer.hpp"

#include <array>
#include <cctype>
#include <cstdlib>
#include <string>

#include "prs/error.hpp"

namespace prs {

namespace {

constexpr std::array kKeywords = {
    "on",     "at",      "facing", "completely", "ahead",  "of",
    "by",     "from",    "with",   "in",         "aligned", "beyond",
    "toward", "towards", "left",   "right",      "behind", "above",
    "below",  "top",     "bottom", "front",      "back",   "relative",
    "to",     "along",   "class",  "V3D"};

}  // namespace

bool is_keyword(std::string_view word) {
  for (const char* kw : kKeywords) {
    if (word == kw) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  int depth = 0;
  size_t i = 0;

  const auto last_kind = [&]() -> TokenKind {
    return out.empty() ? TokenKind::Newline : out.back().kind;
  };
  const auto push = [&](TokenKind kind, std::string tok_text, int tok_line,
                        int tok_col, double number = 0.0) {
    out.push_back({kind, std::move(tok_text), number, tok_line, tok_col});
  };

  while (i < text.size()) {
    const char c = text[i];
    const int at_line = line, at_col = col;

    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
      // A newline ends a declaration only at top level and only when the
      // previous token does not already promise a continuation.
      if (depth == 0 && last_kind() != TokenKind::Newline &&
          last_kind() != TokenKind::Comma) {
        push(TokenKind::Newline, "\n", at_line, at_col);
      }
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;  // the newline itself is handled above
    }
    if (c == '(') {
      ++depth;
      push(TokenKind::LParen, "(", at_line, at_col);
      ++i;
      ++col;
      continue;
    }
    if (c == ')') {
      if (depth > 0) --depth;
      push(TokenKind::RParen, ")", at_line, at_col);
      ++i;
      ++col;
      continue;
    }
    if (c == ',') {
      push(TokenKind::Comma, ",", at_line, at_col);
      ++i;
      ++col;
      continue;
    }
    if (c == ':') {
      push(TokenKind::Colon, ":", at_line, at_col);
      ++i;
      ++col;
      continue;
    }
    if (c == '+') {
      push(TokenKind::Plus, "+", at_line, at_col);
      ++i;
      ++col;
      continue;
    }
    if (c == '-') {
      push(TokenKind::Minus, "-", at_line, at_col);
      ++i;
      ++col;
      continue;
    }
    if (c == '=') {
      push(TokenKind::Equals, "=", at_line, at_col);
      ++i;
      ++col;
      continue;
    }
    if (c == '"' || c == '\'') {
      const char quote = c;
      size_t j = i + 1;
      while (j < text.size() && text[j] != quote && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != quote) {
        fail(ErrorCode::Lex, "unterminated string literal", at_line, at_col);
      }
      push(TokenKind::String, std::string(text.substr(i + 1, j - i - 1)),
           at_line, at_col);
      col += static_cast<int>(j + 1 - i);
      i = j + 1;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < text.size() &&
         std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      size_t j = i;
      while (j < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[j])))
        ++j;
      if (j < text.size() && text[j] == '.') {
        ++j;
        while (j < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[j])))
          ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() &&
            std::isdigit(static_cast<unsigned char>(text[k]))) {
          ++k;
          while (k < text.size() &&
                 std::isdigit(static_cast<unsigned char>(text[k])))
            ++k;
          j = k;
        }
      }
      const std::string slice(text.substr(i, j - i));
      push(TokenKind::Number, slice, at_line, at_col,
           std::strtod(slice.c_str(), nullptr));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_'))
        ++j;
      std::string word(text.substr(i, j - i));
      const TokenKind kind =
          is_keyword(word) ? TokenKind::Keyword : TokenKind::Ident;
      push(kind, std::move(word), at_line, at_col);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    fail(ErrorCode::Lex, std::string("unexpected character '") + c + "'",
         at_line, at_col);
  }

  if (last_kind() != TokenKind::Newline) {
    push(TokenKind::Newline, "\n", line, col);
  }
  push(TokenKind::End, "", line, col);
  return out;
}

}  // namespace prs
