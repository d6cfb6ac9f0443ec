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

#ifndef MEMBUG_DIFF_H_
#define MEMBUG_DIFF_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "membug/invariant.h"
#include "membug/memory.h"

namespace membug {

// Same point, vars and family on both sides, different parameters.
struct ChangedInvariant {
  InvariantInstance stable;
  InvariantInstance buggy;
};

struct PointDiff {
  ProgramPoint point;
  std::vector<InvariantInstance> only_in_buggy;
  std::vector<InvariantInstance> only_in_stable;
  std::vector<ChangedInvariant> changed;

  int64_t delta_count() const {
    return static_cast<int64_t>(only_in_buggy.size() + only_in_stable.size() +
                                changed.size());
  }
  // Lines of the form "- inv", "+ inv" and "~ stable -> buggy".
  std::vector<std::string> Lines() const;
};

enum class DiffSide { kBuggyOnly, kStableOnly };

struct UnmatchedPoint {
  ProgramPoint point;
  DiffSide side = DiffSide::kBuggyOnly;
};

struct InvariantDiff {
  // Every point present in both sets, by identity.
  std::vector<PointDiff> points;
  // Points present in only one set, by identity.
  std::vector<UnmatchedPoint> unmatched;

  // True when no matched point has a delta and no point is unmatched.
  bool empty() const;
};

InvariantDiff DiffInvariants(const InvariantSet& buggy, const InvariantSet& stable);

struct RankWeights {
  double delta = 1.0;
  double in_stack = 10.0;
};

struct RootCauseEntry {
  ProgramPoint point;
  int64_t delta_count = 0;
  bool in_error_stack = false;
  double score = 0.0;
  // Diff lines at this point.
  std::vector<std::string> evidence;
  // Frames of the buggy run's errors that name this point's function.
  std::vector<StackFrame> frames;
};

struct RootCauseReport {
  // Score descending, then point identity ascending.
  std::vector<RootCauseEntry> ranking;
  std::vector<MemError> mem_errors;
  InvariantDiff diff;
};

// Ranks every point with a nonzero delta or whose function appears in an
// error stack by weights.delta * delta + weights.in_stack * in_stack.
RootCauseReport RankRootCauses(InvariantDiff diff, std::vector<MemError> errors,
                               const RankWeights& weights);

// "11" for integral scores, otherwise the shortest round-trip decimal.
std::string FormatScore(double score);

std::string RenderDiff(const InvariantDiff& diff);
std::string RenderRootCauseReport(const RootCauseReport& report);

nlohmann::json DiffToJson(const InvariantDiff& diff);
nlohmann::json ReportToJson(const RootCauseReport& report);

}  // namespace membug

#endif  // MEMBUG_DIFF_H_
