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

#ifndef MEMBUG_LEXER_H_
#define MEMBUG_LEXER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "membug/ast.h"
#include "membug/diagnostic.h"

namespace membug {

enum class TokenKind {
  kIdentifier,
  kIntLiteral,
  kCharLiteral,
  kStringLiteral,
  // Keywords.
  kInt,
  kChar,
  kVoid,
  kIf,
  kElse,
  kWhile,
  kReturn,
  kNull,
  // Punctuation.
  kLParen,
  kRParen,
  kLBrace,
  kRBrace,
  kLBracket,
  kRBracket,
  kSemicolon,
  kComma,
  kAssign,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kPercent,
  kBang,
  kAmp,
  kAmpAmp,
  kPipePipe,
  kEqEq,
  kBangEq,
  kLt,
  kLe,
  kGt,
  kGe,
  kEof,
};

struct Token {
  TokenKind kind = TokenKind::kEof;
  // Source spelling; decoded contents for string literals.
  std::string text;
  int64_t int_value = 0;
  SourceLocation loc;
};

// Human-readable spelling used in diagnostics, e.g. "'{'" or "end of file".
std::string Describe(const Token& token);

// Tokenizes MiniC source. The last token is always kEof. Stops at the first
// lexical error.
Result<std::vector<Token>> Lex(std::string_view source, const std::string& file);

}  // namespace membug

#endif  // MEMBUG_LEXER_H_
