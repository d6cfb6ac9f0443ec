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

#ifndef MEMBUG_CLI_H_
#define MEMBUG_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace membug {

enum ExitCode : int {
  kExitClean = 0,
  kExitFindings = 1,
  kExitUsage = 2,
  kExitCrashed = 3,
};

// Runs the membug command line. argv[0] is the tool name; target program
// arguments follow the first "--". Reports go to `out`, diagnostics to `err`.
int RunCli(const std::vector<std::string>& argv, std::ostream& out,
           std::ostream& err);

}  // namespace membug

#endif  // MEMBUG_CLI_H_
