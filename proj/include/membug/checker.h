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

#ifndef MEMBUG_CHECKER_H_
#define MEMBUG_CHECKER_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "membug/ast.h"
#include "membug/diagnostic.h"

namespace membug {

// A name-resolved, fully typed program. Every Expr in ast() carries its type
// and resolved Symbol; that annotation is the program's type table.
class CheckedProgram {
 public:
  const Ast& ast() const { return ast_; }
  const std::string& file() const { return ast_.file; }
  const FunctionDef& entry() const { return ast_.functions[entry_]; }
  int entry_index() const { return entry_; }
  const FunctionDef& function(int index) const { return ast_.functions[index]; }
  const GlobalDecl& global(int index) const { return ast_.globals[index]; }
  // Contents of every string literal, indexed by Expr::literal_index, in
  // source order. Contents exclude the terminating NUL.
  const std::vector<std::string>& string_literals() const { return literals_; }

 private:
  friend class Checker;

  Ast ast_;
  int entry_ = -1;
  std::vector<std::string> literals_;
};

// Resolves names and types. Any error-severity diagnostic means no program.
Result<CheckedProgram> Check(Ast ast);

// Parse followed by Check.
Result<CheckedProgram> Compile(std::string_view source, const std::string& file);

}  // namespace membug

#endif  // MEMBUG_CHECKER_H_
