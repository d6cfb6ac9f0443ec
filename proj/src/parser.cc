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

#include "membug/parser.h"

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "membug/lexer.h"

namespace membug {
namespace {

// Thrown internally to unwind on the first syntax error.
struct SyntaxError {
  Diagnostic diagnostic;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Ast ParseProgram(const std::string& file) {
    Ast ast;
    ast.file = file;
    while (!At(TokenKind::kEof)) {
      const Token& start = Peek();
      Type type = ParseTypeSpec();
      const Token& name = Expect(TokenKind::kIdentifier, "a name");
      if (At(TokenKind::kLParen)) {
        ast.functions.push_back(ParseFunction(start, type, name.text));
      } else {
        ast.globals.push_back(ParseGlobal(start, type, name.text));
      }
    }
    return ast;
  }

 private:
  const Token& Peek(size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool At(TokenKind kind) const { return Peek().kind == kind; }
  const Token& Advance() {
    const Token& token = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return token;
  }
  bool Accept(TokenKind kind) {
    if (!At(kind)) return false;
    Advance();
    return true;
  }
  [[noreturn]] void Fail(const Token& at, const std::string& expected) {
    std::string message = "unexpected token " + Describe(at);
    if (!expected.empty()) message += ", expected " + expected;
    throw SyntaxError{Diagnostic{Severity::kError, message, at.loc}};
  }
  const Token& Expect(TokenKind kind, const std::string& what) {
    if (!At(kind)) Fail(Peek(), what);
    return Advance();
  }

  static bool IsTypeStart(TokenKind kind) {
    return kind == TokenKind::kInt || kind == TokenKind::kChar ||
           kind == TokenKind::kVoid;
  }

  Type ParseTypeSpec() {
    Type type;
    switch (Peek().kind) {
      case TokenKind::kInt:
        type = Type::Int();
        break;
      case TokenKind::kChar:
        type = Type::Char();
        break;
      case TokenKind::kVoid:
        type = Type::Void();
        break;
      default:
        Fail(Peek(), "a type");
    }
    Advance();
    while (Accept(TokenKind::kStar)) type = Type::PointerTo(type);
    return type;
  }

  // Optional "[N]" suffix on a declarator.
  Type ParseArraySuffix(Type type) {
    if (!Accept(TokenKind::kLBracket)) return type;
    const Token& size = Expect(TokenKind::kIntLiteral, "an array length");
    if (size.int_value < 0) Fail(size, "an array length");
    Expect(TokenKind::kRBracket, "']'");
    return Type::ArrayOf(type, size.int_value);
  }

  GlobalDecl ParseGlobal(const Token& start, Type type, std::string name) {
    GlobalDecl global;
    global.loc = start.loc;
    global.name = std::move(name);
    global.type = ParseArraySuffix(std::move(type));
    if (Accept(TokenKind::kAssign)) global.init = ParseExpr();
    Expect(TokenKind::kSemicolon, "';'");
    return global;
  }

  FunctionDef ParseFunction(const Token& start, Type return_type,
                            std::string name) {
    FunctionDef fn;
    fn.loc = start.loc;
    fn.name = std::move(name);
    fn.return_type = std::move(return_type);
    Expect(TokenKind::kLParen, "'('");
    if (At(TokenKind::kVoid) && Peek(1).kind == TokenKind::kRParen) {
      Advance();
    } else if (!At(TokenKind::kRParen)) {
      do {
        Param param;
        param.loc = Peek().loc;
        param.type = ParseTypeSpec();
        param.name = Expect(TokenKind::kIdentifier, "a parameter name").text;
        fn.params.push_back(std::move(param));
      } while (Accept(TokenKind::kComma));
    }
    Expect(TokenKind::kRParen, "')'");
    if (!At(TokenKind::kLBrace)) Fail(Peek(), "'{'");
    fn.body = ParseStatement();
    return fn;
  }

  Stmt ParseStatement() {
    Stmt stmt;
    stmt.loc = Peek().loc;
    const TokenKind kind = Peek().kind;
    if (IsTypeStart(kind)) {
      stmt.kind = StmtKind::kDecl;
      Type type = ParseTypeSpec();
      stmt.name = Expect(TokenKind::kIdentifier, "a variable name").text;
      stmt.decl_type = ParseArraySuffix(std::move(type));
      if (Accept(TokenKind::kAssign)) stmt.exprs.push_back(ParseExpr());
      Expect(TokenKind::kSemicolon, "';'");
    } else if (kind == TokenKind::kIf) {
      Advance();
      stmt.kind = StmtKind::kIf;
      Expect(TokenKind::kLParen, "'('");
      stmt.exprs.push_back(ParseExpr());
      Expect(TokenKind::kRParen, "')'");
      stmt.body.push_back(ParseStatement());
      if (Accept(TokenKind::kElse)) stmt.body.push_back(ParseStatement());
    } else if (kind == TokenKind::kWhile) {
      Advance();
      stmt.kind = StmtKind::kWhile;
      Expect(TokenKind::kLParen, "'('");
      stmt.exprs.push_back(ParseExpr());
      Expect(TokenKind::kRParen, "')'");
      stmt.body.push_back(ParseStatement());
    } else if (kind == TokenKind::kReturn) {
      Advance();
      stmt.kind = StmtKind::kReturn;
      if (!At(TokenKind::kSemicolon)) stmt.exprs.push_back(ParseExpr());
      Expect(TokenKind::kSemicolon, "';'");
    } else if (kind == TokenKind::kLBrace) {
      Advance();
      stmt.kind = StmtKind::kBlock;
      while (!At(TokenKind::kRBrace)) {
        if (At(TokenKind::kEof)) Fail(Peek(), "'}'");
        stmt.body.push_back(ParseStatement());
      }
      Advance();
    } else {
      Expr target = ParseExpr();
      if (Accept(TokenKind::kAssign)) {
        stmt.kind = StmtKind::kAssign;
        stmt.exprs.push_back(std::move(target));
        stmt.exprs.push_back(ParseExpr());
      } else {
        stmt.kind = StmtKind::kExpr;
        stmt.exprs.push_back(std::move(target));
      }
      Expect(TokenKind::kSemicolon, "';'");
    }
    return stmt;
  }

  // Binary operator precedence; 0 for tokens that are not binary operators.
  static int Precedence(TokenKind kind) {
    switch (kind) {
      case TokenKind::kPipePipe:
        return 1;
      case TokenKind::kAmpAmp:
        return 2;
      case TokenKind::kEqEq:
      case TokenKind::kBangEq:
        return 3;
      case TokenKind::kLt:
      case TokenKind::kLe:
      case TokenKind::kGt:
      case TokenKind::kGe:
        return 4;
      case TokenKind::kPlus:
      case TokenKind::kMinus:
        return 5;
      case TokenKind::kStar:
      case TokenKind::kSlash:
      case TokenKind::kPercent:
        return 6;
      default:
        return 0;
    }
  }

  static BinaryOp ToBinaryOp(TokenKind kind) {
    switch (kind) {
      case TokenKind::kPipePipe:
        return BinaryOp::kOr;
      case TokenKind::kAmpAmp:
        return BinaryOp::kAnd;
      case TokenKind::kEqEq:
        return BinaryOp::kEq;
      case TokenKind::kBangEq:
        return BinaryOp::kNe;
      case TokenKind::kLt:
        return BinaryOp::kLt;
      case TokenKind::kLe:
        return BinaryOp::kLe;
      case TokenKind::kGt:
        return BinaryOp::kGt;
      case TokenKind::kGe:
        return BinaryOp::kGe;
      case TokenKind::kPlus:
        return BinaryOp::kAdd;
      case TokenKind::kMinus:
        return BinaryOp::kSub;
      case TokenKind::kStar:
        return BinaryOp::kMul;
      case TokenKind::kSlash:
        return BinaryOp::kDiv;
      default:
        return BinaryOp::kMod;
    }
  }

  Expr ParseExpr(int min_precedence = 1) {
    Expr lhs = ParseUnary();
    while (true) {
      const int precedence = Precedence(Peek().kind);
      if (precedence < min_precedence) return lhs;
      const BinaryOp op = ToBinaryOp(Advance().kind);
      Expr rhs = ParseExpr(precedence + 1);
      Expr binary;
      binary.kind = ExprKind::kBinary;
      binary.loc = lhs.loc;
      binary.binary_op = op;
      binary.operands.push_back(std::move(lhs));
      binary.operands.push_back(std::move(rhs));
      lhs = std::move(binary);
    }
  }

  Expr ParseUnary() {
    const Token& start = Peek();
    std::optional<UnaryOp> op;
    switch (start.kind) {
      case TokenKind::kMinus:
        // Negative integer literals fold into a single literal node.
        if (Peek(1).kind == TokenKind::kIntLiteral) {
          Advance();
          const Token& literal = Advance();
          Expr expr;
          expr.kind = ExprKind::kIntLiteral;
          expr.loc = start.loc;
          expr.int_value = static_cast<int64_t>(
              0 - static_cast<uint64_t>(literal.int_value));
          return ParsePostfix(std::move(expr));
        }
        op = UnaryOp::kNegate;
        break;
      case TokenKind::kBang:
        op = UnaryOp::kNot;
        break;
      case TokenKind::kStar:
        op = UnaryOp::kDeref;
        break;
      case TokenKind::kAmp:
        op = UnaryOp::kAddressOf;
        break;
      default:
        return ParsePostfix(ParsePrimary());
    }
    Advance();
    Expr expr;
    expr.kind = ExprKind::kUnary;
    expr.loc = start.loc;
    expr.unary_op = *op;
    expr.operands.push_back(ParseUnary());
    return expr;
  }

  Expr ParsePostfix(Expr expr) {
    while (true) {
      if (At(TokenKind::kLParen)) {
        if (expr.kind != ExprKind::kIdentifier) Fail(Peek(), "';'");
        Advance();
        Expr call;
        call.kind = ExprKind::kCall;
        call.loc = expr.loc;
        call.text = expr.text;
        if (!At(TokenKind::kRParen)) {
          do {
            call.operands.push_back(ParseExpr());
          } while (Accept(TokenKind::kComma));
        }
        Expect(TokenKind::kRParen, "')'");
        expr = std::move(call);
      } else if (At(TokenKind::kLBracket)) {
        Advance();
        Expr index;
        index.kind = ExprKind::kIndex;
        index.loc = expr.loc;
        index.operands.push_back(std::move(expr));
        index.operands.push_back(ParseExpr());
        Expect(TokenKind::kRBracket, "']'");
        expr = std::move(index);
      } else {
        return expr;
      }
    }
  }

  Expr ParsePrimary() {
    const Token& token = Peek();
    Expr expr;
    expr.loc = token.loc;
    switch (token.kind) {
      case TokenKind::kIntLiteral:
        if (token.int_value == std::numeric_limits<int64_t>::min()) {
          throw SyntaxError{Diagnostic{
              Severity::kError,
              "integer literal '" + token.text + "' out of range", token.loc}};
        }
        expr.kind = ExprKind::kIntLiteral;
        expr.int_value = token.int_value;
        break;
      case TokenKind::kCharLiteral:
        expr.kind = ExprKind::kCharLiteral;
        expr.int_value = token.int_value;
        break;
      case TokenKind::kStringLiteral:
        expr.kind = ExprKind::kStringLiteral;
        expr.text = token.text;
        break;
      case TokenKind::kNull:
        expr.kind = ExprKind::kNull;
        break;
      case TokenKind::kIdentifier:
        expr.kind = ExprKind::kIdentifier;
        expr.text = token.text;
        break;
      case TokenKind::kLParen: {
        Advance();
        Expr inner = ParseExpr();
        Expect(TokenKind::kRParen, "')'");
        return inner;
      }
      default:
        Fail(token, "an expression");
    }
    Advance();
    return expr;
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

}  // namespace

Result<Ast> Parse(std::string_view source, const std::string& file) {
  Result<std::vector<Token>> tokens = Lex(source, file);
  if (!tokens) return tokens.diagnostics();
  Parser parser(std::move(tokens).value());
  try {
    return parser.ParseProgram(file);
  } catch (const SyntaxError& error) {
    return Diagnostics{error.diagnostic};
  }
}

}  // namespace membug
