// Copyright 2026 The membug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "membug/lexer.h"

#include <cctype>
#include <limits>
#include <optional>
#include <unordered_map>

namespace membug {
namespace {

const std::unordered_map<std::string_view, TokenKind>& Keywords() {
  static const auto* keywords =
      new std::unordered_map<std::string_view, TokenKind>{
          {"int", TokenKind::kInt},       {"char", TokenKind::kChar},
          {"void", TokenKind::kVoid},     {"if", TokenKind::kIf},
          {"else", TokenKind::kElse},     {"while", TokenKind::kWhile},
          {"return", TokenKind::kReturn}, {"null", TokenKind::kNull},
          {"NULL", TokenKind::kNull},
      };
  return *keywords;
}

class Lexer {
 public:
  Lexer(std::string_view source, const std::string& file)
      : source_(source), file_(file) {}

  Result<std::vector<Token>> Run() {
    std::vector<Token> tokens;
    while (true) {
      if (auto error = SkipTrivia()) return Diagnostics{*error};
      Token token;
      token.loc = Here();
      if (AtEnd()) {
        token.kind = TokenKind::kEof;
        tokens.push_back(std::move(token));
        return tokens;
      }
      const size_t start = pos_;
      const char c = Advance();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (!AtEnd() && (std::isalnum(static_cast<unsigned char>(Peek())) ||
                            Peek() == '_')) {
          Advance();
        }
        token.text = std::string(source_.substr(start, pos_ - start));
        auto it = Keywords().find(token.text);
        token.kind = it == Keywords().end() ? TokenKind::kIdentifier : it->second;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        if (auto error = LexNumber(start, token)) return Diagnostics{*error};
      } else if (c == '\'') {
        if (auto error = LexChar(token)) return Diagnostics{*error};
      } else if (c == '"') {
        if (auto error = LexString(token)) return Diagnostics{*error};
      } else if (auto kind = LexPunct(c)) {
        token.kind = *kind;
        token.text = std::string(source_.substr(start, pos_ - start));
      } else {
        return Diagnostics{Error(token.loc, "bad character '" +
                                                std::string(1, c) + "'")};
      }
      tokens.push_back(std::move(token));
    }
  }

 private:
  bool AtEnd() const { return pos_ >= source_.size(); }
  char Peek(size_t ahead = 0) const {
    return pos_ + ahead < source_.size() ? source_[pos_ + ahead] : '\0';
  }
  char Advance() {
    const char c = source_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }
  SourceLocation Here() const { return SourceLocation{file_, line_, column_}; }

  Diagnostic Error(const SourceLocation& loc, std::string message) const {
    return Diagnostic{Severity::kError, std::move(message), loc};
  }

  std::optional<Diagnostic> SkipTrivia() {
    while (!AtEnd()) {
      const char c = Peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        Advance();
      } else if (c == '/' && Peek(1) == '/') {
        while (!AtEnd() && Peek() != '\n') Advance();
      } else if (c == '/' && Peek(1) == '*') {
        const SourceLocation start = Here();
        Advance();
        Advance();
        while (!(Peek() == '*' && Peek(1) == '/')) {
          if (AtEnd()) return Error(start, "unterminated comment");
          Advance();
        }
        Advance();
        Advance();
      } else {
        break;
      }
    }
    return std::nullopt;
  }

  std::optional<Diagnostic> LexNumber(size_t start, Token& token) {
    int base = 10;
    if (source_[start] == '0' && (Peek() == 'x' || Peek() == 'X')) {
      Advance();
      base = 16;
    }
    while (!AtEnd() && std::isalnum(static_cast<unsigned char>(Peek()))) {
      Advance();
    }
    token.text = std::string(source_.substr(start, pos_ - start));
    const std::string digits = base == 16 ? token.text.substr(2) : token.text;
    if (digits.empty()) {
      return Error(token.loc, "malformed integer literal '" + token.text + "'");
    }
    uint64_t value = 0;
    for (char d : digits) {
      int digit;
      if (std::isdigit(static_cast<unsigned char>(d))) {
        digit = d - '0';
      } else if (base == 16 && std::isxdigit(static_cast<unsigned char>(d))) {
        digit = std::tolower(static_cast<unsigned char>(d)) - 'a' + 10;
      } else {
        return Error(token.loc,
                     "malformed integer literal '" + token.text + "'");
      }
      if (value > (std::numeric_limits<uint64_t>::max() - digit) / base) {
        return Error(token.loc,
                     "integer literal '" + token.text + "' out of range");
      }
      value = value * base + digit;
    }
    // One past INT64_MAX is admitted so that "-9223372036854775808" parses.
    if (value > static_cast<uint64_t>(std::numeric_limits<int64_t>::max()) + 1) {
      return Error(token.loc, "integer literal '" + token.text + "' out of range");
    }
    token.kind = TokenKind::kIntLiteral;
    token.int_value = static_cast<int64_t>(value);
    return std::nullopt;
  }

  // Decodes one possibly-escaped character after the opening quote.
  std::optional<Diagnostic> LexEscaped(const SourceLocation& start,
                                       const char* what, char& out) {
    if (AtEnd() || Peek() == '\n') {
      return Error(start, std::string("unterminated ") + what);
    }
    char c = Advance();
    if (c != '\\') {
      out = c;
      return std::nullopt;
    }
    if (AtEnd()) return Error(start, std::string("unterminated ") + what);
    const SourceLocation escape_loc = Here();
    c = Advance();
    switch (c) {
      case 'n':
        out = '\n';
        break;
      case 't':
        out = '\t';
        break;
      case 'r':
        out = '\r';
        break;
      case '0':
        out = '\0';
        break;
      case '\\':
      case '\'':
      case '"':
        out = c;
        break;
      default:
        return Error(escape_loc,
                     "unknown escape sequence '\\" + std::string(1, c) + "'");
    }
    return std::nullopt;
  }

  std::optional<Diagnostic> LexChar(Token& token) {
    char value;
    if (Peek() == '\'') return Error(token.loc, "empty character literal");
    if (auto error = LexEscaped(token.loc, "character literal", value)) {
      return error;
    }
    if (Peek() != '\'') return Error(token.loc, "unterminated character literal");
    Advance();
    token.kind = TokenKind::kCharLiteral;
    token.int_value = static_cast<signed char>(value);
    token.text = std::string(1, value);
    return std::nullopt;
  }

  std::optional<Diagnostic> LexString(Token& token) {
    std::string value;
    while (Peek() != '"') {
      char c;
      if (auto error = LexEscaped(token.loc, "string literal", c)) return error;
      value.push_back(c);
    }
    Advance();
    token.kind = TokenKind::kStringLiteral;
    token.text = std::move(value);
    return std::nullopt;
  }

  std::optional<TokenKind> LexPunct(char c) {
    auto two = [&](char next, TokenKind yes, TokenKind no) {
      if (Peek() == next) {
        Advance();
        return yes;
      }
      return no;
    };
    switch (c) {
      case '(':
        return TokenKind::kLParen;
      case ')':
        return TokenKind::kRParen;
      case '{':
        return TokenKind::kLBrace;
      case '}':
        return TokenKind::kRBrace;
      case '[':
        return TokenKind::kLBracket;
      case ']':
        return TokenKind::kRBracket;
      case ';':
        return TokenKind::kSemicolon;
      case ',':
        return TokenKind::kComma;
      case '+':
        return TokenKind::kPlus;
      case '-':
        return TokenKind::kMinus;
      case '*':
        return TokenKind::kStar;
      case '/':
        return TokenKind::kSlash;
      case '%':
        return TokenKind::kPercent;
      case '=':
        return two('=', TokenKind::kEqEq, TokenKind::kAssign);
      case '!':
        return two('=', TokenKind::kBangEq, TokenKind::kBang);
      case '<':
        return two('=', TokenKind::kLe, TokenKind::kLt);
      case '>':
        return two('=', TokenKind::kGe, TokenKind::kGt);
      case '&':
        return two('&', TokenKind::kAmpAmp, TokenKind::kAmp);
      case '|':
        if (Peek() == '|') {
          Advance();
          return TokenKind::kPipePipe;
        }
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

  std::string_view source_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

std::string Describe(const Token& token) {
  switch (token.kind) {
    case TokenKind::kEof:
      return "end of file";
    case TokenKind::kStringLiteral:
      return "string literal";
    case TokenKind::kCharLiteral:
      return "character literal";
    default:
      return "'" + token.text + "'";
  }
}

Result<std::vector<Token>> Lex(std::string_view source,
                               const std::string& file) {
  return Lexer(source, file).Run();
}

}  // namespace membug
