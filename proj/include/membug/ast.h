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

#ifndef MEMBUG_AST_H_
#define MEMBUG_AST_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace membug {

// 1-based position of the first character of a construct.
struct SourceLocation {
  std::string file;
  int line = 1;
  int column = 1;

  bool operator==(const SourceLocation&) const = default;
};

enum class TypeKind { kVoid, kInt, kChar, kPointer, kArray };

// MiniC type. Pointer and array types share their immutable element type.
class Type {
 public:
  Type() = default;

  static Type Void() { return Type(TypeKind::kVoid); }
  static Type Int() { return Type(TypeKind::kInt); }
  static Type Char() { return Type(TypeKind::kChar); }
  static Type PointerTo(const Type& element);
  static Type ArrayOf(const Type& element, int64_t length);

  TypeKind kind() const { return kind_; }
  bool is_void() const { return kind_ == TypeKind::kVoid; }
  bool is_integral() const {
    return kind_ == TypeKind::kInt || kind_ == TypeKind::kChar;
  }
  bool is_pointer() const { return kind_ == TypeKind::kPointer; }
  bool is_array() const { return kind_ == TypeKind::kArray; }
  // Values usable as a condition: integers and pointers.
  bool is_scalar() const { return is_integral() || is_pointer(); }

  // Requires is_pointer() or is_array().
  const Type& element() const { return *element_; }
  int64_t array_length() const { return length_; }

  // Storage size in bytes; int and pointers are 8, char is 1.
  int64_t size_bytes() const;

  std::string ToString() const;

  bool operator==(const Type& other) const;

 private:
  explicit Type(TypeKind kind) : kind_(kind) {}

  TypeKind kind_ = TypeKind::kVoid;
  std::shared_ptr<const Type> element_;
  int64_t length_ = 0;
};

enum class ExprKind {
  kIntLiteral,
  kCharLiteral,
  kStringLiteral,
  kNull,
  kIdentifier,
  kUnary,
  kBinary,
  kCall,
  kIndex,
};

enum class UnaryOp { kNegate, kNot, kDeref, kAddressOf };

enum class BinaryOp {
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMod,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kAnd,
  kOr,
};

const char* ToString(UnaryOp op);
const char* ToString(BinaryOp op);

enum class SymbolKind { kNone, kLocal, kGlobal, kFunction, kBuiltin };

enum class Builtin { kMalloc, kFree, kPrintInt, kPrintStr };

// Resolution of an identifier or callee, filled in by Check().
struct Symbol {
  SymbolKind kind = SymbolKind::kNone;
  // Local slot, global index, function index, or Builtin enumerator.
  int index = -1;

  bool operator==(const Symbol&) const = default;
};

struct Expr {
  ExprKind kind = ExprKind::kIntLiteral;
  SourceLocation loc;
  // Int and char literal value.
  int64_t int_value = 0;
  // Identifier or callee name; decoded string literal contents.
  std::string text;
  UnaryOp unary_op = UnaryOp::kNegate;
  BinaryOp binary_op = BinaryOp::kAdd;
  // Unary: [operand]. Binary: [lhs, rhs]. Call: arguments. Index: [base, index].
  std::vector<Expr> operands;

  // Set by Check().
  Type type;
  Symbol symbol;
  // Index into CheckedProgram::string_literals() for string literals.
  int literal_index = -1;
};

enum class StmtKind { kDecl, kAssign, kIf, kWhile, kReturn, kExpr, kBlock };

struct Stmt {
  StmtKind kind = StmtKind::kBlock;
  SourceLocation loc;
  // kDecl only.
  std::string name;
  Type decl_type;
  // kDecl: [init] or empty. kAssign: [target, value]. kIf/kWhile: [cond].
  // kReturn: [value] or empty. kExpr: [expr].
  std::vector<Expr> exprs;
  // kBlock: statements. kIf: [then] or [then, else]. kWhile: [body].
  std::vector<Stmt> body;
  // kDecl: frame slot assigned by Check().
  int slot = -1;
};

struct Param {
  std::string name;
  Type type;
  SourceLocation loc;
};

struct FunctionDef {
  std::string name;
  Type return_type;
  std::vector<Param> params;
  Stmt body;
  SourceLocation loc;
  // Number of frame slots (parameters first), set by Check().
  int num_slots = 0;
};

struct GlobalDecl {
  std::string name;
  Type type;
  std::optional<Expr> init;
  SourceLocation loc;
};

struct Ast {
  std::string file;
  std::vector<GlobalDecl> globals;
  std::vector<FunctionDef> functions;
};

}  // namespace membug

#endif  // MEMBUG_AST_H_
