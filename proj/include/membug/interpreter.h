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

#ifndef MEMBUG_INTERPRETER_H_
#define MEMBUG_INTERPRETER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "membug/checker.h"
#include "membug/memory.h"

namespace membug {

enum class ExecMode { kPlain, kMemcheck };

// Read-only view of the interpreter at a function entry or exit.
struct MachineState {
  const CheckedProgram& program;
  const AddressSpace& memory;
  const FunctionDef& function;
  // Frame slots of `function`; parameters occupy the first slots.
  std::span<const BlockId> slots;
  // Storage block of every global, by global index.
  std::span<const BlockId> globals;
};

class ExecutionObserver {
 public:
  virtual ~ExecutionObserver() = default;
  // After parameters are bound.
  virtual void OnEnter(const MachineState& state) = 0;
  // Before the frame is released. `result` is empty for void functions.
  virtual void OnExit(const MachineState& state,
                      const std::optional<Value>& result) = 0;
};

struct ExitStatus {
  enum class Kind { kExited, kCrashed };
  Kind kind = Kind::kExited;
  // main's return value when kExited.
  int64_t code = 0;
};

struct ExecutionOutcome {
  ExitStatus status;
  // In execution order. When crashed, the crashing error is last.
  std::vector<MemError> errors;
  // Present only after a normal exit.
  std::optional<LeakReport> leaks;
  std::string stdout_text;

  bool crashed() const { return status.kind == ExitStatus::Kind::kCrashed; }
  const MemError& crash() const { return errors.back(); }
};

struct ExecuteOptions {
  ExecMode mode = ExecMode::kMemcheck;
  ExecutionObserver* observer = nullptr;
  // argv[0]; defaults to the program's file name.
  std::string program_name;
  int64_t max_steps = 20'000'000;
  int max_call_depth = 2000;
};

// Thrown when a run exceeds ExecuteOptions limits; the target program is
// considered non-terminating rather than faulty.
class ExecutionLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs `program` with argv = [program name] + args. In kPlain mode only
// crashes are recorded; in kMemcheck mode every shadow violation is.
ExecutionOutcome Execute(const CheckedProgram& program,
                         const std::vector<std::string>& args,
                         const ExecuteOptions& options);

inline ExecutionOutcome Execute(const CheckedProgram& program,
                                const std::vector<std::string>& args,
                                ExecMode mode) {
  ExecuteOptions options;
  options.mode = mode;
  return Execute(program, args, options);
}

}  // namespace membug

#endif  // MEMBUG_INTERPRETER_H_
