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

#include "membug/checker.h"

#include <map>
#include <unordered_map>
#include <utility>

#include "membug/parser.h"

namespace membug {
namespace {

struct Local {
  int slot;
  Type type;
};

const std::map<std::string, Builtin>& Builtins() {
  static const auto* builtins = new std::map<std::string, Builtin>{
      {"malloc", Builtin::kMalloc},
      {"free", Builtin::kFree},
      {"print_int", Builtin::kPrintInt},
      {"print_str", Builtin::kPrintStr},
  };
  return *builtins;
}

Type Decay(const Type& type) {
  return type.is_array() ? Type::PointerTo(type.element()) : type;
}

bool IsCharConstant(const Expr& expr) {
  return (expr.kind == ExprKind::kIntLiteral && expr.int_value >= -128 &&
          expr.int_value <= 127) ||
         expr.kind == ExprKind::kCharLiteral;
}

}  // namespace

class Checker {
 public:
  Result<CheckedProgram> Run(Ast ast) {
    program_.ast_ = std::move(ast);
    Ast& a = program_.ast_;

    for (size_t i = 0; i < a.functions.size(); ++i) {
      const FunctionDef& fn = a.functions[i];
      if (Builtins().count(fn.name)) {
        Error(fn.loc, "redefinition of builtin function " + fn.name);
      } else if (!functions_.emplace(fn.name, static_cast<int>(i)).second) {
        Error(fn.loc, "duplicate function name " + fn.name);
      }
    }
    for (size_t i = 0; i < a.globals.size(); ++i) {
      GlobalDecl& global = a.globals[i];
      if (functions_.count(global.name) || Builtins().count(global.name)) {
        Error(global.loc, "global " + global.name + " redeclares a function");
      } else if (!globals_.emplace(global.name, static_cast<int>(i)).second) {
        Error(global.loc, "duplicate global variable " + global.name);
      }
      CheckGlobal(global);
    }

    auto main_it = functions_.find("main");
    if (main_it == functions_.end()) {
      Error(SourceLocation{a.file, 1, 1}, "missing main");
    } else {
      program_.entry_ = main_it->second;
      CheckMainSignature(a.functions[main_it->second]);
    }
    for (FunctionDef& fn : a.functions) CheckFunction(fn);

    if (HasErrors(diagnostics_)) return diagnostics_;
    return std::move(program_);
  }

 private:
  void Error(const SourceLocation& loc, std::string message) {
    diagnostics_.push_back(Diagnostic{Severity::kError, std::move(message), loc});
  }

  static bool ValidObjectType(const Type& type) {
    if (type.is_void()) return false;
    if (type.is_array()) {
      return type.array_length() > 0 && ValidObjectType(type.element()) &&
             !type.element().is_array();
    }
    return true;
  }

  void CheckMainSignature(const FunctionDef& fn) {
    bool ok = fn.return_type == Type::Int();
    if (fn.params.size() == 2) {
      ok = ok && fn.params[0].type == Type::Int() &&
           fn.params[1].type == Type::PointerTo(Type::PointerTo(Type::Char()));
    } else if (!fn.params.empty()) {
      ok = false;
    }
    if (!ok) {
      Error(fn.loc,
            "main must be declared 'int main()' or "
            "'int main(int argc, char** argv)'");
    }
  }

  void CheckGlobal(GlobalDecl& global) {
    if (!ValidObjectType(global.type)) {
      Error(global.loc, "invalid type " + global.type.ToString() +
                            " for variable " + global.name);
      return;
    }
    if (!global.init) return;
    Expr& init = *global.init;
    const bool constant = init.kind == ExprKind::kIntLiteral ||
                          init.kind == ExprKind::kCharLiteral ||
                          init.kind == ExprKind::kStringLiteral ||
                          init.kind == ExprKind::kNull;
    if (!constant) {
      Error(init.loc, "initializer of global " + global.name +
                          " is not a constant");
      return;
    }
    CheckInitializer(global.type, init, global.name);
  }

  void CheckInitializer(const Type& type, Expr& init, const std::string& name) {
    if (type.is_array()) {
      if (type.element() != Type::Char() ||
          init.kind != ExprKind::kStringLiteral) {
        Error(init.loc, "array " + name +
                            " can only be initialized from a string literal");
        return;
      }
      CheckExpr(init);
      if (static_cast<int64_t>(init.text.size()) + 1 > type.array_length()) {
        Error(init.loc, "string literal does not fit in " + name);
      }
      return;
    }
    if (auto source = CheckExpr(init)) {
      CheckAssignable(type, init, *source, "initialization of " + name);
    }
  }

  // Reports and returns false when a value of `source` type cannot be stored
  // in an object of `target` type.
  bool CheckAssignable(const Type& target, const Expr& expr, const Type& source,
                       const std::string& what) {
    const Type value = Decay(source);
    bool ok = false;
    if (value.is_void()) {
      Error(expr.loc, "void value used in " + what);
      return false;
    }
    switch (target.kind()) {
      case TypeKind::kInt:
        ok = value.is_integral();
        break;
      case TypeKind::kChar:
        if (value == Type::Int() && !IsCharConstant(expr)) {
          Error(expr.loc, "implicit narrowing from int to char in " + what);
          return false;
        }
        ok = value.is_integral();
        break;
      case TypeKind::kPointer:
        ok = value.is_pointer() &&
             (value == target || value.element().is_void() ||
              target.element().is_void());
        break;
      default:
        ok = false;
    }
    if (!ok) {
      Error(expr.loc, "type mismatch in " + what + ": cannot convert " +
                          value.ToString() + " to " + target.ToString());
    }
    return ok;
  }

  void CheckFunction(FunctionDef& fn) {
    current_ = &fn;
    next_slot_ = 0;
    scopes_.clear();
    scopes_.emplace_back();
    if (fn.return_type.is_array()) {
      Error(fn.loc, "function " + fn.name + " cannot return an array");
    }
    for (const Param& param : fn.params) {
      if (!ValidObjectType(param.type) || param.type.is_array()) {
        Error(param.loc, "invalid type " + param.type.ToString() +
                             " for parameter " + param.name);
      }
      if (!scopes_.back().emplace(param.name, Local{next_slot_, param.type})
               .second) {
        Error(param.loc, "duplicate parameter " + param.name);
      }
      ++next_slot_;
    }
    CheckStmt(fn.body);
    fn.num_slots = next_slot_;
    current_ = nullptr;
  }

  void CheckCondition(Expr& cond) {
    if (auto type = CheckExpr(cond)) {
      if (!Decay(*type).is_scalar()) {
        Error(cond.loc, "condition has non-scalar type " + type->ToString());
      }
    }
  }

  void CheckStmt(Stmt& stmt) {
    switch (stmt.kind) {
      case StmtKind::kDecl: {
        if (!ValidObjectType(stmt.decl_type)) {
          Error(stmt.loc, "invalid type " + stmt.decl_type.ToString() +
                              " for variable " + stmt.name);
        }
        if (!stmt.exprs.empty()) {
          CheckInitializer(stmt.decl_type, stmt.exprs[0], stmt.name);
        }
        // The declared name is visible only after its initializer.
        stmt.slot = next_slot_++;
        if (!scopes_.back().emplace(stmt.name, Local{stmt.slot, stmt.decl_type})
                 .second) {
          Error(stmt.loc, "redeclaration of " + stmt.name);
        }
        break;
      }
      case StmtKind::kAssign: {
        Expr& target = stmt.exprs[0];
        auto target_type = CheckExpr(target);
        auto value_type = CheckExpr(stmt.exprs[1]);
        if (!target_type || !value_type) break;
        if (!IsLvalue(target)) {
          Error(target.loc, "left side of assignment is not assignable");
        } else if (target_type->is_array()) {
          Error(target.loc, "cannot assign to array");
        } else {
          CheckAssignable(*target_type, stmt.exprs[1], *value_type,
                          "assignment");
        }
        break;
      }
      case StmtKind::kIf:
      case StmtKind::kWhile:
        CheckCondition(stmt.exprs[0]);
        for (Stmt& child : stmt.body) {
          scopes_.emplace_back();
          CheckStmt(child);
          scopes_.pop_back();
        }
        break;
      case StmtKind::kReturn: {
        const Type& ret = current_->return_type;
        if (stmt.exprs.empty()) {
          if (!ret.is_void()) {
            Error(stmt.loc, "non-void function " + current_->name +
                                " must return a value");
          }
        } else if (ret.is_void()) {
          Error(stmt.loc, "void function " + current_->name +
                              " cannot return a value");
        } else if (auto type = CheckExpr(stmt.exprs[0])) {
          CheckAssignable(ret, stmt.exprs[0], *type, "return");
        }
        break;
      }
      case StmtKind::kExpr:
        CheckExpr(stmt.exprs[0], /*allow_void=*/true);
        break;
      case StmtKind::kBlock:
        scopes_.emplace_back();
        for (Stmt& child : stmt.body) CheckStmt(child);
        scopes_.pop_back();
        break;
    }
  }

  static bool IsLvalue(const Expr& expr) {
    switch (expr.kind) {
      case ExprKind::kIdentifier:
        return expr.symbol.kind == SymbolKind::kLocal ||
               expr.symbol.kind == SymbolKind::kGlobal;
      case ExprKind::kIndex:
        return true;
      case ExprKind::kUnary:
        return expr.unary_op == UnaryOp::kDeref;
      default:
        return false;
    }
  }

  const Local* LookupLocal(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    return nullptr;
  }

  // Returns the (undecayed) type, or nullopt after reporting an error.
  std::optional<Type> CheckExpr(Expr& expr, bool allow_void = false) {
    std::optional<Type> type = Infer(expr);
    if (type && type->is_void() && !allow_void) {
      Error(expr.loc, "void value not ignored as it ought to be");
      type.reset();
    }
    if (type) expr.type = *type;
    return type;
  }

  // Operand value type after array decay, or nullopt.
  std::optional<Type> CheckValue(Expr& expr) {
    auto type = CheckExpr(expr);
    if (!type) return std::nullopt;
    return Decay(*type);
  }

  std::optional<Type> Infer(Expr& expr) {
    switch (expr.kind) {
      case ExprKind::kIntLiteral:
        return Type::Int();
      case ExprKind::kCharLiteral:
        return Type::Char();
      case ExprKind::kStringLiteral:
        expr.literal_index = static_cast<int>(program_.literals_.size());
        program_.literals_.push_back(expr.text);
        return Type::ArrayOf(Type::Char(),
                             static_cast<int64_t>(expr.text.size()) + 1);
      case ExprKind::kNull:
        return Type::PointerTo(Type::Void());
      case ExprKind::kIdentifier:
        return InferIdentifier(expr);
      case ExprKind::kUnary:
        return InferUnary(expr);
      case ExprKind::kBinary:
        return InferBinary(expr);
      case ExprKind::kCall:
        return InferCall(expr);
      case ExprKind::kIndex: {
        auto base = CheckValue(expr.operands[0]);
        auto index = CheckValue(expr.operands[1]);
        if (!base || !index) return std::nullopt;
        if (!base->is_pointer() || base->element().is_void()) {
          Error(expr.loc, "cannot index a value of type " + base->ToString());
          return std::nullopt;
        }
        if (!index->is_integral()) {
          Error(expr.operands[1].loc, "array index has non-integer type " +
                                          index->ToString());
          return std::nullopt;
        }
        return base->element();
      }
    }
    return std::nullopt;
  }

  std::optional<Type> InferIdentifier(Expr& expr) {
    if (current_ != nullptr) {
      if (const Local* local = LookupLocal(expr.text)) {
        expr.symbol = Symbol{SymbolKind::kLocal, local->slot};
        return local->type;
      }
    }
    if (auto it = globals_.find(expr.text); it != globals_.end()) {
      expr.symbol = Symbol{SymbolKind::kGlobal, it->second};
      return program_.ast_.globals[it->second].type;
    }
    if (functions_.count(expr.text) || Builtins().count(expr.text)) {
      Error(expr.loc, "function " + expr.text + " used as a value");
      return std::nullopt;
    }
    Error(expr.loc, "undeclared identifier " + expr.text);
    return std::nullopt;
  }

  std::optional<Type> InferUnary(Expr& expr) {
    Expr& operand = expr.operands[0];
    switch (expr.unary_op) {
      case UnaryOp::kNegate: {
        auto type = CheckValue(operand);
        if (!type) return std::nullopt;
        if (!type->is_integral()) {
          Error(expr.loc, "cannot negate a value of type " + type->ToString());
          return std::nullopt;
        }
        return Type::Int();
      }
      case UnaryOp::kNot: {
        auto type = CheckValue(operand);
        if (!type) return std::nullopt;
        if (!type->is_scalar()) {
          Error(expr.loc, "invalid operand of type " + type->ToString() +
                              " to '!'");
          return std::nullopt;
        }
        return Type::Int();
      }
      case UnaryOp::kDeref: {
        auto type = CheckValue(operand);
        if (!type) return std::nullopt;
        if (!type->is_pointer() || type->element().is_void()) {
          Error(expr.loc,
                "cannot dereference a value of type " + type->ToString());
          return std::nullopt;
        }
        return type->element();
      }
      case UnaryOp::kAddressOf: {
        auto type = CheckExpr(operand);
        if (!type) return std::nullopt;
        if (!IsLvalue(operand) || type->is_array()) {
          Error(expr.loc, "cannot take the address of this expression");
          return std::nullopt;
        }
        return Type::PointerTo(*type);
      }
    }
    return std::nullopt;
  }

  std::optional<Type> InferBinary(Expr& expr) {
    auto lhs = CheckValue(expr.operands[0]);
    auto rhs = CheckValue(expr.operands[1]);
    if (!lhs || !rhs) return std::nullopt;
    const BinaryOp op = expr.binary_op;
    auto mismatch = [&]() -> std::optional<Type> {
      Error(expr.loc, std::string("invalid operands to '") + ToString(op) +
                          "' (" + lhs->ToString() + " and " + rhs->ToString() +
                          ")");
      return std::nullopt;
    };
    const bool both_int = lhs->is_integral() && rhs->is_integral();
    switch (op) {
      case BinaryOp::kAdd:
        if (both_int) return Type::Int();
        if (lhs->is_pointer() && rhs->is_integral() &&
            !lhs->element().is_void()) {
          return *lhs;
        }
        if (lhs->is_integral() && rhs->is_pointer() &&
            !rhs->element().is_void()) {
          return *rhs;
        }
        return mismatch();
      case BinaryOp::kSub:
        if (both_int) return Type::Int();
        if (lhs->is_pointer() && rhs->is_integral() &&
            !lhs->element().is_void()) {
          return *lhs;
        }
        return mismatch();
      case BinaryOp::kMul:
      case BinaryOp::kDiv:
      case BinaryOp::kMod:
        if (both_int) return Type::Int();
        return mismatch();
      case BinaryOp::kEq:
      case BinaryOp::kNe:
        if (both_int) return Type::Int();
        if (lhs->is_pointer() && rhs->is_pointer() &&
            (*lhs == *rhs || lhs->element().is_void() ||
             rhs->element().is_void())) {
          return Type::Int();
        }
        return mismatch();
      case BinaryOp::kLt:
      case BinaryOp::kLe:
      case BinaryOp::kGt:
      case BinaryOp::kGe:
        if (both_int) return Type::Int();
        if (lhs->is_pointer() && *lhs == *rhs) return Type::Int();
        return mismatch();
      case BinaryOp::kAnd:
      case BinaryOp::kOr:
        if (lhs->is_scalar() && rhs->is_scalar()) return Type::Int();
        return mismatch();
    }
    return std::nullopt;
  }

  std::optional<Type> InferCall(Expr& expr) {
    if (current_ != nullptr && LookupLocal(expr.text) != nullptr) {
      Error(expr.loc, expr.text + " is not a function");
      return std::nullopt;
    }
    if (auto it = Builtins().find(expr.text); it != Builtins().end()) {
      expr.symbol = Symbol{SymbolKind::kBuiltin, static_cast<int>(it->second)};
      return InferBuiltinCall(expr, it->second);
    }
    auto it = functions_.find(expr.text);
    if (it == functions_.end()) {
      if (globals_.count(expr.text)) {
        Error(expr.loc, expr.text + " is not a function");
      } else {
        Error(expr.loc, "undeclared function " + expr.text);
      }
      return std::nullopt;
    }
    expr.symbol = Symbol{SymbolKind::kFunction, it->second};
    const FunctionDef& callee = program_.ast_.functions[it->second];
    if (expr.operands.size() != callee.params.size()) {
      Error(expr.loc, "function " + callee.name + " expects " +
                          std::to_string(callee.params.size()) +
                          " argument(s) but " +
                          std::to_string(expr.operands.size()) + " given");
    }
    for (size_t i = 0; i < expr.operands.size(); ++i) {
      auto arg = CheckExpr(expr.operands[i]);
      if (arg && i < callee.params.size()) {
        CheckAssignable(callee.params[i].type, expr.operands[i], *arg,
                        "argument " + std::to_string(i + 1) + " of " +
                            callee.name);
      }
    }
    return callee.return_type;
  }

  std::optional<Type> InferBuiltinCall(Expr& expr, Builtin builtin) {
    if (expr.operands.size() != 1) {
      Error(expr.loc, expr.text + " expects 1 argument but " +
                          std::to_string(expr.operands.size()) + " given");
      for (Expr& operand : expr.operands) CheckExpr(operand);
      return std::nullopt;
    }
    Expr& arg = expr.operands[0];
    auto type = CheckExpr(arg);
    if (!type) return std::nullopt;
    switch (builtin) {
      case Builtin::kMalloc:
        if (!CheckAssignable(Type::Int(), arg, *type, "argument of malloc")) {
          return std::nullopt;
        }
        return Type::PointerTo(Type::Void());
      case Builtin::kFree:
        if (!CheckAssignable(Type::PointerTo(Type::Void()), arg, *type,
                             "argument of free")) {
          return std::nullopt;
        }
        return Type::Void();
      case Builtin::kPrintInt:
        if (!CheckAssignable(Type::Int(), arg, *type, "argument of print_int")) {
          return std::nullopt;
        }
        return Type::Void();
      case Builtin::kPrintStr:
        if (!CheckAssignable(Type::PointerTo(Type::Char()), arg, *type,
                             "argument of print_str")) {
          return std::nullopt;
        }
        return Type::Void();
    }
    return std::nullopt;
  }

  CheckedProgram program_;
  Diagnostics diagnostics_;
  std::unordered_map<std::string, int> functions_;
  std::unordered_map<std::string, int> globals_;
  std::vector<std::unordered_map<std::string, Local>> scopes_;
  FunctionDef* current_ = nullptr;
  int next_slot_ = 0;
};

Result<CheckedProgram> Check(Ast ast) { return Checker().Run(std::move(ast)); }

Result<CheckedProgram> Compile(std::string_view source,
                               const std::string& file) {
  Result<Ast> ast = Parse(source, file);
  if (!ast) return ast.diagnostics();
  return Check(std::move(ast).value());
}

}  // namespace membug
