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

#ifndef MEMBUG_PARSER_H_
#define MEMBUG_PARSER_H_

#include <string>
#include <string_view>

#include "membug/ast.h"
#include "membug/diagnostic.h"

namespace membug {

// Parses MiniC source into an unchecked Ast. Stops at the first syntax or
// lexical error and reports it as a single Diagnostic.
Result<Ast> Parse(std::string_view source, const std::string& file);

}  // namespace membug

#endif  // MEMBUG_PARSER_H_
