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

#ifndef MEMBUG_TESTS_SUPPORT_REFERENCE_VM_H_
#define MEMBUG_TESTS_SUPPORT_REFERENCE_VM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "membug/checker.h"
#include "membug/interpreter.h"
#include "membug/memory.h"

namespace membug::testing {

// Observable result of an execution, reduced to what both the production
// interpreter and the reference model can produce.
struct ObservedError {
  MemErrorKind kind = MemErrorKind::kInvalidRead;
  std::optional<int64_t> size;
  std::optional<Address> address;
  std::optional<AddressClassKind> address_class;
  StackTrace stack;
  bool fatal = false;

  bool operator==(const ObservedError&) const = default;
};

struct ObservedOutcome {
  bool crashed = false;
  int64_t exit_code = 0;
  std::vector<ObservedError> errors;
  std::string stdout_text;
  int64_t lost_blocks = 0;
  int64_t lost_bytes = 0;
  int64_t reachable_blocks = 0;
  int64_t reachable_bytes = 0;

  bool operator==(const ObservedOutcome&) const = default;
};

ObservedOutcome Observe(const ExecutionOutcome& outcome);

std::string Describe(const ObservedOutcome& outcome);

// Straightforward re-simulation of MiniC over an explicit per-byte model of
// addressability and definedness. Shares no code with the production
// interpreter or address space.
ObservedOutcome ReferenceExecute(const CheckedProgram& program,
                                 const std::vector<std::string>& args,
                                 bool memcheck);

}  // namespace membug::testing

#endif  // MEMBUG_TESTS_SUPPORT_REFERENCE_VM_H_
