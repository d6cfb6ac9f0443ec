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

#include "membug/pipeline.h"

#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "membug/report.h"

namespace membug {

Result<CheckedProgram> LoadProgram(const std::string& path) {
  const std::string name = std::filesystem::path(path).filename().string();
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return Diagnostics{Diagnostic{Severity::kError,
                                  "cannot open file '" + path + "'",
                                  SourceLocation{name, 1, 1}}};
  }
  std::ostringstream source;
  source << in.rdbuf();
  return Compile(source.str(), name);
}

PipelineResult RunPipeline(const CheckedProgram& buggy, const CheckedProgram& stable,
                           const std::vector<std::string>& args,
                           const PipelineConfig& config) {
  PipelineResult result;
  result.buggy_outcome = Execute(buggy, args, ExecMode::kMemcheck);

  auto buggy_future =
      std::async(std::launch::async, [&] { return TraceExecution(buggy, args); });
  auto stable_future =
      std::async(std::launch::async, [&] { return TraceExecution(stable, args); });
  result.buggy_run = buggy_future.get();
  result.stable_run = stable_future.get();

  if (result.stable_run.outcome.crashed()) {
    const MemError& crash = result.stable_run.outcome.crash();
    std::string where = crash.stack.frames.empty()
                            ? std::string()
                            : " in " + crash.stack.frames.front().function;
    result.warnings.push_back("stable version " + stable.file() + " crashed" +
                              where + ": " + KindSentence(crash));
  }

  result.buggy_invariants = InferInvariants(result.buggy_run.trace, config.inference);
  result.stable_invariants =
      InferInvariants(result.stable_run.trace, config.inference);
  result.report = RankRootCauses(
      DiffInvariants(result.buggy_invariants, result.stable_invariants),
      result.buggy_outcome.errors, config.weights);
  return result;
}

}  // namespace membug
