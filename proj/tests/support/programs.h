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

#ifndef MEMBUG_TESTS_SUPPORT_PROGRAMS_H_
#define MEMBUG_TESTS_SUPPORT_PROGRAMS_H_

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "membug/checker.h"

namespace membug::testing {

// Compiles a program that is expected to be valid; throws with the
// diagnostics otherwise.
inline CheckedProgram CompileOrThrow(std::string_view source,
                                     const std::string& file = "t.mc") {
  auto program = Compile(source, file);
  if (!program.ok()) {
    std::string message;
    for (const Diagnostic& d : program.diagnostics()) message += d.ToString() + "\n";
    throw std::runtime_error(message + std::string(source));
  }
  return std::move(program).value();
}

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace membug::testing

#endif  // MEMBUG_TESTS_SUPPORT_PROGRAMS_H_
