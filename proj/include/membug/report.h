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

#ifndef MEMBUG_REPORT_H_
#define MEMBUG_REPORT_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "membug/interpreter.h"
#include "membug/memory.h"

namespace membug {

// "Invalid read of size 1", "Conditional jump or move depends on ...".
std::string KindSentence(const MemError& error);

// One error block:
//   == Invalid read of size 1
//      at my_strcmp (buggy.mc:12)
//      by main (buggy.mc:40)
//      Address 0x0 is not stack'd, malloc'd or (recently) free'd
std::string RenderMemError(const MemError& error);

// Error blocks separated by "==" lines, plus the SIGSEGV trailer when the
// last error is fatal.
std::string RenderMemErrors(const std::vector<MemError>& errors);

// Full memcheck report: errors, error summary and, after a normal exit, the
// leak records and leak summary.
std::string RenderMemcheckReport(const ExecutionOutcome& outcome);

nlohmann::json MemErrorToJson(const MemError& error);
nlohmann::json OutcomeToJson(const ExecutionOutcome& outcome);

}  // namespace membug

#endif  // MEMBUG_REPORT_H_
