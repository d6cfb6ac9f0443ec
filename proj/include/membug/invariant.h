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

#ifndef MEMBUG_INVARIANT_H_
#define MEMBUG_INVARIANT_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "membug/memory.h"
#include "membug/rational.h"
#include "membug/trace.h"

namespace membug {

using Scalar = std::variant<int64_t, Address>;

struct Constant {
  Scalar value;
  bool operator==(const Constant&) const = default;
};
struct NonNull {
  bool operator==(const NonNull&) const = default;
};
struct IsNull {
  bool operator==(const IsNull&) const = default;
};
// Tracks the observed minimum.
struct LowerBound {
  int64_t lo = 0;
  bool operator==(const LowerBound&) const = default;
};
// Tracks the observed maximum.
struct UpperBound {
  int64_t hi = 0;
  bool operator==(const UpperBound&) const = default;
};
// Sorted, duplicate-free.
struct OneOfSet {
  std::vector<int64_t> values;
  bool operator==(const OneOfSet&) const = default;
};
struct EqualVars {
  bool operator==(const EqualVars&) const = default;
};
// vars[0] < vars[1].
struct LessThan {
  bool operator==(const LessThan&) const = default;
};
// vars[0] <= vars[1].
struct LessEq {
  bool operator==(const LessEq&) const = default;
};
// vars[1] == a * vars[0] + b, with a != 0.
struct LinearBinary {
  Rational a;
  Rational b;
  bool operator==(const LinearBinary&) const = default;
};
struct SortedAsc {
  bool operator==(const SortedAsc&) const = default;
};
struct SortedDesc {
  bool operator==(const SortedDesc&) const = default;
};
struct AllElementsEqual {
  bool operator==(const AllElementsEqual&) const = default;
};
// Tracks the observed element range; lo > hi until an element is seen.
struct ElementsInRange {
  int64_t lo = 0;
  int64_t hi = 0;
  bool operator==(const ElementsInRange&) const = default;
};

using InvariantTemplate =
    std::variant<Constant, NonNull, IsNull, LowerBound, UpperBound, OneOfSet,
                 EqualVars, LessThan, LessEq, LinearBinary, SortedAsc,
                 SortedDesc, AllElementsEqual, ElementsInRange>;

// Stable family name, e.g. "LinearBinary".
const char* FamilyName(const InvariantTemplate& tmpl);

enum class InvariantStatus { kCandidate, kFalsified, kJustified };

struct InvariantInstance {
  ProgramPoint point;
  std::vector<std::string> vars;
  InvariantTemplate tmpl;
  int64_t samples_seen = 0;
  InvariantStatus status = InvariantStatus::kCandidate;

  // Invariant text, e.g. "y == 2*x - 1" or "arr sorted asc".
  std::string Render() const;
  const char* family() const { return FamilyName(tmpl); }
};

// Canonical order within a point: vars, then family name, then rendering.
bool CanonicalLess(const InvariantInstance& a, const InvariantInstance& b);

struct InferenceConfig {
  int min_samples = 3;
  int max_one_of_size = 3;
  bool enable_suppression = true;
};

struct PointInvariants {
  ProgramPoint point;
  std::vector<InvariantInstance> invariants;
};

struct InvariantSet {
  std::string trace_name;
  InferenceConfig config;
  // Sorted by point identity; includes every point of the source trace.
  std::vector<PointInvariants> points;
};

enum class CheckResult { kHolds, kFalsified };

// Evaluates `instance` on one sample, widening tracked bounds and sets and
// counting the sample when it holds. A missing or nonsensical variable
// falsifies.
CheckResult CheckInvariant(InvariantInstance& instance, const TraceSample& sample,
                           int max_one_of_size = 3);

// y == a*x + b through two points; empty if x1 == x2, a == 0, or the
// coefficients do not fit.
std::optional<LinearBinary> FitLinear(std::pair<int64_t, int64_t> p1,
                                      std::pair<int64_t, int64_t> p2);
// Exact check of y == a*x + b.
bool LinearHolds(const LinearBinary& line, int64_t x, int64_t y);

// Removes justified invariants implied by stronger ones at the same point.
std::vector<InvariantInstance> Suppress(std::vector<InvariantInstance> invariants);

InvariantSet InferInvariants(const Trace& trace, const InferenceConfig& config);

class InvariantFormatError : public std::runtime_error {
 public:
  InvariantFormatError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

// Parses one rendered invariant back into an instance at `point`.
std::optional<InvariantInstance> ParseInvariant(const ProgramPoint& point,
                                                const std::string& text);

std::string FormatInvariantSet(const InvariantSet& set);
size_t WriteInvariantSet(const InvariantSet& set, std::ostream& sink);
// Throws InvariantFormatError with the offending line.
InvariantSet ReadInvariantSet(std::istream& source);
InvariantSet ParseInvariantSet(const std::string& text);

}  // namespace membug

#endif  // MEMBUG_INVARIANT_H_
