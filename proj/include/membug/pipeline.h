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

#ifndef MEMBUG_PIPELINE_H_
#define MEMBUG_PIPELINE_H_

#include <string>
#include <vector>

#include "membug/checker.h"
#include "membug/diagnostic.h"
#include "membug/diff.h"
#include "membug/interpreter.h"
#include "membug/invariant.h"
#include "membug/trace.h"

namespace membug {

// Reads and compiles a MiniC file. Locations name the file by its base name.
Result<CheckedProgram> LoadProgram(const std::string& path);

struct PipelineConfig {
  InferenceConfig inference;
  RankWeights weights;
};

struct PipelineResult {
  RootCauseReport report;
  ExecutionOutcome buggy_outcome;
  TracedRun buggy_run;
  TracedRun stable_run;
  InvariantSet buggy_invariants;
  InvariantSet stable_invariants;
  // Non-fatal findings about the inputs, e.g. a crashing stable version.
  std::vector<std::string> warnings;
};

// Memchecks the buggy version, traces both versions concurrently, infers and
// diffs their invariants, and ranks the differing points against the buggy
// run's error stacks.
PipelineResult RunPipeline(const CheckedProgram& buggy, const CheckedProgram& stable,
                           const std::vector<std::string>& args,
                           const PipelineConfig& config);

}  // namespace membug

#endif  // MEMBUG_PIPELINE_H_
