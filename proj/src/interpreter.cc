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

#include "membug/interpreter.h"

#include <filesystem>
#include <limits>
#include <utility>

namespace membug {
namespace {

// Unwinds the interpreter on a fatal error; the error is already recorded.
struct Crash {};

enum class Flow { kNormal, kReturn };

constexpr int64_t kMaxMallocBytes = int64_t{1} << 24;
constexpr int64_t kMaxPrintedString = int64_t{1} << 20;

Value Undefined(int width) {
  Value value;
  value.width = static_cast<uint8_t>(width);
  return value;
}

// Integer result of an operation on `a` and `b`: all-undefined if any
// operand byte is undefined.
Value IntResult(int64_t result, bool defined) {
  Value value = Value::Int(result);
  if (!defined) value.vmask = 0;
  return value;
}

bool Truthy(const Value& value) {
  return value.width == 1 ? (value.bits & 0xFF) != 0 : value.bits != 0;
}

// Converts a value to the representation of `target` (int, char or pointer).
Value Convert(const Value& value, const Type& target) {
  if (target.kind() == TypeKind::kChar) {
    Value out;
    out.width = 1;
    out.bits = value.bits & 0xFF;
    out.vmask = value.defined() ? 1 : 0;
    return out;
  }
  if (target.kind() == TypeKind::kInt && value.width == 1) {
    return IntResult(value.as_int(), value.defined());
  }
  return value;
}

class Interpreter {
 public:
  Interpreter(const CheckedProgram& program, const ExecuteOptions& options)
      : program_(program), options_(options) {}

  ExecutionOutcome Run(const std::vector<std::string>& args) {
    ExecutionOutcome outcome;
    try {
      InitializeStatics();
      std::vector<Value> main_args;
      const FunctionDef& main_fn = program_.entry();
      if (main_fn.params.size() == 2) {
        main_args.push_back(Value::Int(static_cast<int64_t>(args.size()) + 1));
        main_args.push_back(Value::Pointer(BuildArgv(args)));
      }
      const Value result = Invoke(main_fn, main_args, nullptr);
      outcome.status.kind = ExitStatus::Kind::kExited;
      outcome.status.code = result.as_int();
      outcome.leaks = LeakScan(memory_);
    } catch (const Crash&) {
      outcome.status.kind = ExitStatus::Kind::kCrashed;
    }
    outcome.errors = std::move(errors_);
    outcome.stdout_text = std::move(stdout_);
    return outcome;
  }

 private:
  struct Frame {
    const FunctionDef* function = nullptr;
    std::vector<BlockId> slots;
    // Call expression currently executing in this frame.
    const Expr* active_call = nullptr;
    std::optional<Value> return_value;
  };

  bool memcheck() const { return options_.mode == ExecMode::kMemcheck; }

  StackTrace CurrentStack(const SourceLocation& loc) const {
    StackTrace stack;
    for (size_t i = frames_.size(); i-- > 0;) {
      const Frame& frame = frames_[i];
      const SourceLocation& where =
          i + 1 == frames_.size() ? loc : frame.active_call->loc;
      stack.frames.push_back(StackFrame{frame.function->name, where});
    }
    return stack;
  }

  void Report(MemError error) {
    if (!memcheck() && !error.fatal) return;
    const bool fatal = error.fatal;
    errors_.push_back(std::move(error));
    if (fatal) throw Crash{};
  }

  void CheckValueUse(const Value& value, UseContext context,
                     const SourceLocation& loc) {
    if (!memcheck() || value.defined()) return;
    if (auto error = CheckUse(value, context, CurrentStack(loc))) {
      Report(std::move(*error));
    }
  }

  Value LoadChecked(Address addr, int width, const SourceLocation& loc) {
    if (auto error = CheckAccess(memory_, addr, width, AccessKind::kRead,
                                 CurrentStack(loc))) {
      Report(std::move(*error));
    }
    return memory_.Load(addr, width);
  }

  void StoreChecked(Address addr, const Value& value, bool is_pointer,
                    const SourceLocation& loc) {
    if (auto error = CheckAccess(memory_, addr, value.width, AccessKind::kWrite,
                                 CurrentStack(loc))) {
      Report(std::move(*error));
    }
    memory_.Store(addr, value, is_pointer);
  }

  void Step() {
    if (++steps_ > options_.max_steps) {
      throw ExecutionLimitExceeded("step limit of " +
                                   std::to_string(options_.max_steps) +
                                   " exceeded");
    }
  }

  void InitializeStatics() {
    const Ast& ast = program_.ast();
    for (const GlobalDecl& global : ast.globals) {
      globals_.push_back(memory_.Allocate(BlockKind::kGlobal,
                                          global.type.size_bytes(), true));
    }
    for (const std::string& literal : program_.string_literals()) {
      literals_.push_back(StoreString(BlockKind::kLiteral, literal));
    }
    for (size_t i = 0; i < ast.globals.size(); ++i) {
      const GlobalDecl& global = ast.globals[i];
      if (!global.init) continue;
      const Address addr{globals_[i], 0};
      const Expr& init = *global.init;
      if (global.type.is_array()) {
        CopyString(addr, init.text);
      } else if (init.kind == ExprKind::kStringLiteral) {
        memory_.Store(addr, Value::Pointer({literals_[init.literal_index], 0}),
                      true);
      } else if (init.kind == ExprKind::kNull) {
        memory_.Store(addr, Value::Pointer({}), true);
      } else {
        memory_.Store(addr, Convert(Value::Int(init.int_value), global.type),
                      false);
      }
    }
  }

  BlockId StoreString(BlockKind kind, const std::string& text) {
    const BlockId id = memory_.Allocate(
        kind, static_cast<int64_t>(text.size()) + 1, true);
    CopyString(Address{id, 0}, text);
    return id;
  }

  void CopyString(Address addr, const std::string& text) {
    for (size_t i = 0; i < text.size(); ++i) {
      memory_.Store(addr + static_cast<int64_t>(i),
                    Value::Char(static_cast<unsigned char>(text[i])), false);
    }
  }

  Address BuildArgv(const std::vector<std::string>& args) {
    std::string name = options_.program_name;
    if (name.empty()) {
      name = std::filesystem::path(program_.file()).filename().string();
    }
    std::vector<BlockId> strings;
    strings.push_back(StoreString(BlockKind::kArgv, name));
    for (const std::string& arg : args) {
      strings.push_back(StoreString(BlockKind::kArgv, arg));
    }
    const BlockId array = memory_.Allocate(
        BlockKind::kArgv, static_cast<int64_t>(strings.size() + 1) * 8, true);
    for (size_t i = 0; i < strings.size(); ++i) {
      memory_.Store(Address{array, static_cast<int32_t>(i * 8)},
                    Value::Pointer({strings[i], 0}), true);
    }
    memory_.Store(Address{array, static_cast<int32_t>(strings.size() * 8)},
                  Value::Pointer({}), true);
    return Address{array, 0};
  }

  MachineState State() const {
    const Frame& frame = frames_.back();
    return MachineState{program_, memory_, *frame.function, frame.slots,
                        globals_};
  }

  Value Invoke(const FunctionDef& fn, const std::vector<Value>& args,
               const Expr* call) {
    if (static_cast<int>(frames_.size()) >= options_.max_call_depth) {
      throw ExecutionLimitExceeded("call depth limit of " +
                                   std::to_string(options_.max_call_depth) +
                                   " exceeded in " + fn.name);
    }
    if (!frames_.empty()) frames_.back().active_call = call;
    Frame frame;
    frame.function = &fn;
    frame.slots.assign(fn.num_slots, 0);
    frames_.push_back(std::move(frame));
    for (size_t i = 0; i < fn.params.size(); ++i) {
      const Type& type = fn.params[i].type;
      const BlockId block =
          memory_.Allocate(BlockKind::kStack, type.size_bytes(), false);
      frames_.back().slots[i] = block;
      memory_.Store(Address{block, 0}, Convert(args[i], type),
                    type.is_pointer());
    }
    if (options_.observer != nullptr) options_.observer->OnEnter(State());

    ExecScoped(fn.body);

    std::optional<Value> result;
    if (!fn.return_type.is_void()) {
      result = frames_.back().return_value.value_or(
          Undefined(static_cast<int>(fn.return_type.size_bytes())));
    }
    if (options_.observer != nullptr) options_.observer->OnExit(State(), result);
    for (size_t i = 0; i < fn.params.size(); ++i) {
      memory_.Release(frames_.back().slots[i]);
    }
    frames_.pop_back();
    if (!frames_.empty()) frames_.back().active_call = nullptr;
    return result.value_or(Undefined(8));
  }

  // Runs `stmt` in a fresh scope whose locals are released on exit.
  Flow ExecScoped(const Stmt& stmt) {
    std::vector<BlockId> scope;
    Flow flow;
    if (stmt.kind == StmtKind::kBlock) {
      flow = Flow::kNormal;
      for (const Stmt& child : stmt.body) {
        flow = Exec(child, scope);
        if (flow == Flow::kReturn) break;
      }
    } else {
      flow = Exec(stmt, scope);
    }
    for (BlockId block : scope) memory_.Release(block);
    return flow;
  }

  Flow Exec(const Stmt& stmt, std::vector<BlockId>& scope) {
    Step();
    switch (stmt.kind) {
      case StmtKind::kDecl: {
        const BlockId block = memory_.Allocate(
            BlockKind::kStack, stmt.decl_type.size_bytes(), false);
        frames_.back().slots[stmt.slot] = block;
        scope.push_back(block);
        if (!stmt.exprs.empty()) {
          const Expr& init = stmt.exprs[0];
          if (stmt.decl_type.is_array()) {
            // Remaining bytes of a string-initialized array are zero-filled.
            for (int64_t i = 0; i < stmt.decl_type.size_bytes(); ++i) {
              memory_.Store(Address{block, static_cast<int32_t>(i)},
                            Value::Char(0), false);
            }
            CopyString(Address{block, 0}, init.text);
          } else {
            const Value value = Convert(Eval(init), stmt.decl_type);
            memory_.Store(Address{block, 0}, value,
                          stmt.decl_type.is_pointer());
          }
        }
        return Flow::kNormal;
      }
      case StmtKind::kAssign: {
        const Expr& target = stmt.exprs[0];
        const Address addr = EvalAddress(target);
        const Value value = Convert(Eval(stmt.exprs[1]), target.type);
        StoreChecked(addr, value, target.type.is_pointer(), target.loc);
        return Flow::kNormal;
      }
      case StmtKind::kIf: {
        const Value cond = Eval(stmt.exprs[0]);
        CheckValueUse(cond, UseContext::kBranchCondition, stmt.exprs[0].loc);
        if (Truthy(cond)) return ExecScoped(stmt.body[0]);
        if (stmt.body.size() > 1) return ExecScoped(stmt.body[1]);
        return Flow::kNormal;
      }
      case StmtKind::kWhile:
        while (true) {
          const Value cond = Eval(stmt.exprs[0]);
          CheckValueUse(cond, UseContext::kBranchCondition, stmt.exprs[0].loc);
          if (!Truthy(cond)) return Flow::kNormal;
          if (ExecScoped(stmt.body[0]) == Flow::kReturn) return Flow::kReturn;
          Step();
        }
      case StmtKind::kReturn:
        if (!stmt.exprs.empty()) {
          frames_.back().return_value = Convert(
              Eval(stmt.exprs[0]), frames_.back().function->return_type);
        }
        return Flow::kReturn;
      case StmtKind::kExpr:
        Eval(stmt.exprs[0]);
        return Flow::kNormal;
      case StmtKind::kBlock:
        return ExecScoped(stmt);
    }
    return Flow::kNormal;
  }

  Address EvalAddress(const Expr& expr) {
    switch (expr.kind) {
      case ExprKind::kIdentifier:
        if (expr.symbol.kind == SymbolKind::kLocal) {
          return Address{frames_.back().slots[expr.symbol.index], 0};
        }
        return Address{globals_[expr.symbol.index], 0};
      case ExprKind::kUnary: {
        const Value pointer = Eval(expr.operands[0]);
        CheckValueUse(pointer, UseContext::kAddressOperand, expr.loc);
        return pointer.as_address();
      }
      case ExprKind::kIndex: {
        const Expr& base_expr = expr.operands[0];
        Address base;
        if (base_expr.type.is_array()) {
          base = EvalAddress(base_expr);
        } else {
          const Value pointer = Eval(base_expr);
          CheckValueUse(pointer, UseContext::kAddressOperand, expr.loc);
          base = pointer.as_address();
        }
        const Value index = Eval(expr.operands[1]);
        CheckValueUse(index, UseContext::kAddressOperand, expr.loc);
        return base + index.as_int() * expr.type.size_bytes();
      }
      default:
        // The checker admits only identifiers, dereferences and indexing as
        // lvalues.
        return Address{};
    }
  }

  Value Eval(const Expr& expr) {
    switch (expr.kind) {
      case ExprKind::kIntLiteral:
        return Value::Int(expr.int_value);
      case ExprKind::kCharLiteral:
        return Value::Char(expr.int_value);
      case ExprKind::kStringLiteral:
        return Value::Pointer(Address{literals_[expr.literal_index], 0});
      case ExprKind::kNull:
        return Value::Pointer(Address{});
      case ExprKind::kIdentifier:
      case ExprKind::kIndex:
        if (expr.type.is_array()) return Value::Pointer(EvalAddress(expr));
        return LoadChecked(EvalAddress(expr),
                           static_cast<int>(expr.type.size_bytes()), expr.loc);
      case ExprKind::kUnary:
        return EvalUnary(expr);
      case ExprKind::kBinary:
        return EvalBinary(expr);
      case ExprKind::kCall:
        return EvalCall(expr);
    }
    return Undefined(8);
  }

  Value EvalUnary(const Expr& expr) {
    switch (expr.unary_op) {
      case UnaryOp::kNegate: {
        const Value v = Eval(expr.operands[0]);
        return IntResult(
            static_cast<int64_t>(0 - static_cast<uint64_t>(v.as_int())),
            v.defined());
      }
      case UnaryOp::kNot: {
        const Value v = Eval(expr.operands[0]);
        return IntResult(Truthy(v) ? 0 : 1, v.defined());
      }
      case UnaryOp::kDeref:
        return LoadChecked(EvalAddress(expr),
                           static_cast<int>(expr.type.size_bytes()), expr.loc);
      case UnaryOp::kAddressOf:
        return Value::Pointer(EvalAddress(expr.operands[0]));
    }
    return Undefined(8);
  }

  Value EvalBinary(const Expr& expr) {
    const Expr& lhs_expr = expr.operands[0];
    const Expr& rhs_expr = expr.operands[1];
    if (expr.binary_op == BinaryOp::kAnd || expr.binary_op == BinaryOp::kOr) {
      const Value lhs = Eval(lhs_expr);
      CheckValueUse(lhs, UseContext::kBranchCondition, lhs_expr.loc);
      const bool is_and = expr.binary_op == BinaryOp::kAnd;
      if (Truthy(lhs) != is_and) return Value::Int(is_and ? 0 : 1);
      const Value rhs = Eval(rhs_expr);
      CheckValueUse(rhs, UseContext::kBranchCondition, rhs_expr.loc);
      return Value::Int(Truthy(rhs) ? 1 : 0);
    }

    const Value lhs = Eval(lhs_expr);
    const Value rhs = Eval(rhs_expr);
    const bool defined = lhs.defined() && rhs.defined();
    const bool lhs_ptr = lhs_expr.type.is_pointer() || lhs_expr.type.is_array();
    const bool rhs_ptr = rhs_expr.type.is_pointer() || rhs_expr.type.is_array();

    if (lhs_ptr || rhs_ptr) {
      if (expr.type.is_pointer()) {
        // Pointer arithmetic: pointer +/- integer, integer + pointer.
        const Value& pointer = lhs_ptr ? lhs : rhs;
        const Value& count = lhs_ptr ? rhs : lhs;
        int64_t delta = count.as_int() * expr.type.element().size_bytes();
        if (expr.binary_op == BinaryOp::kSub) delta = -delta;
        Value result = Value::Pointer(pointer.as_address() + delta);
        if (!defined) result.vmask = 0;
        return result;
      }
      const Address a = lhs.as_address();
      const Address b = rhs.as_address();
      bool result = false;
      switch (expr.binary_op) {
        case BinaryOp::kEq:
          result = a == b;
          break;
        case BinaryOp::kNe:
          result = a != b;
          break;
        case BinaryOp::kLt:
          result = a < b;
          break;
        case BinaryOp::kLe:
          result = a <= b;
          break;
        case BinaryOp::kGt:
          result = a > b;
          break;
        case BinaryOp::kGe:
          result = a >= b;
          break;
        default:
          break;
      }
      return IntResult(result ? 1 : 0, defined);
    }

    const int64_t a = lhs.as_int();
    const int64_t b = rhs.as_int();
    const uint64_t ua = static_cast<uint64_t>(a);
    const uint64_t ub = static_cast<uint64_t>(b);
    switch (expr.binary_op) {
      case BinaryOp::kAdd:
        return IntResult(static_cast<int64_t>(ua + ub), defined);
      case BinaryOp::kSub:
        return IntResult(static_cast<int64_t>(ua - ub), defined);
      case BinaryOp::kMul:
        return IntResult(static_cast<int64_t>(ua * ub), defined);
      case BinaryOp::kDiv:
      case BinaryOp::kMod: {
        CheckValueUse(rhs, UseContext::kDivisor, rhs_expr.loc);
        if (!rhs.defined()) return Undefined(8);
        if (b == 0) {
          if (memcheck()) {
            MemError error;
            error.kind = MemErrorKind::kDivisionByZero;
            error.stack = CurrentStack(rhs_expr.loc);
            error.location = rhs_expr.loc;
            Report(std::move(error));
          }
          return Undefined(8);
        }
        if (a == std::numeric_limits<int64_t>::min() && b == -1) {
          return IntResult(expr.binary_op == BinaryOp::kDiv ? a : 0, defined);
        }
        return IntResult(expr.binary_op == BinaryOp::kDiv ? a / b : a % b,
                         defined);
      }
      case BinaryOp::kEq:
        return IntResult(a == b, defined);
      case BinaryOp::kNe:
        return IntResult(a != b, defined);
      case BinaryOp::kLt:
        return IntResult(a < b, defined);
      case BinaryOp::kLe:
        return IntResult(a <= b, defined);
      case BinaryOp::kGt:
        return IntResult(a > b, defined);
      case BinaryOp::kGe:
        return IntResult(a >= b, defined);
      default:
        return Undefined(8);
    }
  }

  Value EvalCall(const Expr& expr) {
    if (expr.symbol.kind == SymbolKind::kBuiltin) {
      return EvalBuiltin(expr, static_cast<Builtin>(expr.symbol.index));
    }
    std::vector<Value> args;
    args.reserve(expr.operands.size());
    for (const Expr& operand : expr.operands) args.push_back(Eval(operand));
    return Invoke(program_.function(expr.symbol.index), args, &expr);
  }

  Value EvalBuiltin(const Expr& expr, Builtin builtin) {
    const Value arg = Eval(expr.operands[0]);
    switch (builtin) {
      case Builtin::kMalloc: {
        const int64_t size = arg.as_int();
        if (size < 0 || size > kMaxMallocBytes) {
          return Value::Pointer(Address{});
        }
        const BlockId block = memory_.Allocate(BlockKind::kHeap, size, false,
                                               CurrentStack(expr.loc));
        return Value::Pointer(Address{block, 0});
      }
      case Builtin::kFree:
        CheckValueUse(arg, UseContext::kAddressOperand, expr.loc);
        Free(arg.as_address(), expr.loc);
        return Undefined(8);
      case Builtin::kPrintInt:
        CheckValueUse(arg, UseContext::kOutput, expr.loc);
        stdout_ += std::to_string(arg.as_int());
        stdout_ += '\n';
        return Undefined(8);
      case Builtin::kPrintStr: {
        CheckValueUse(arg, UseContext::kAddressOperand, expr.loc);
        Address cursor = arg.as_address();
        bool reported = false;
        for (int64_t i = 0; i < kMaxPrintedString; ++i) {
          const Value c = LoadChecked(cursor, 1, expr.loc);
          if (!c.defined() && !reported) {
            CheckValueUse(c, UseContext::kOutput, expr.loc);
            reported = true;
          }
          if ((c.bits & 0xFF) == 0) break;
          stdout_ += static_cast<char>(c.bits & 0xFF);
          cursor = cursor + 1;
        }
        return Undefined(8);
      }
    }
    return Undefined(8);
  }

  void Free(Address addr, const SourceLocation& loc) {
    if (addr.is_null()) return;
    const AddressSpace::Block* block = memory_.FindLive(addr.block);
    if (block != nullptr && block->kind == BlockKind::kHeap &&
        addr.offset == 0) {
      memory_.Free(addr.block, CurrentStack(loc));
      return;
    }
    if (!memcheck()) return;
    MemError error;
    error.kind = memory_.FindFreed(addr.block) != nullptr && addr.offset == 0
                     ? MemErrorKind::kDoubleFree
                     : MemErrorKind::kInvalidFree;
    error.address = addr;
    error.address_class = ClassifyAddress(memory_, addr);
    error.stack = CurrentStack(loc);
    error.location = loc;
    Report(std::move(error));
  }

  const CheckedProgram& program_;
  const ExecuteOptions& options_;
  AddressSpace memory_;
  std::vector<BlockId> globals_;
  std::vector<BlockId> literals_;
  std::vector<Frame> frames_;
  std::vector<MemError> errors_;
  std::string stdout_;
  int64_t steps_ = 0;
};

}  // namespace

ExecutionOutcome Execute(const CheckedProgram& program,
                         const std::vector<std::string>& args,
                         const ExecuteOptions& options) {
  return Interpreter(program, options).Run(args);
}

}  // namespace membug
