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

#include <algorithm>
#include <set>

#include "gtest/gtest.h"
#include "membug/corpus.h"
#include "membug/diff.h"
#include "membug/pipeline.h"
#include "support/generators.h"

namespace membug {
namespace {

InvariantSet Set(const std::string& body) {
  return ParseInvariantSet("miniinv 1\ntrace t\nconfig minSamples=3\n" + body);
}

std::vector<std::string> AllLines(const InvariantDiff& diff) {
  std::vector<std::string> lines;
  for (const PointDiff& point : diff.points) {
    for (const std::string& line : point.Lines()) {
      lines.push_back(point.point.Identity() + " " + line);
    }
  }
  return lines;
}

MemError ErrorIn(std::vector<std::string> functions) {
  MemError error;
  error.kind = MemErrorKind::kInvalidRead;
  error.size = 1;
  int line = 1;
  for (const std::string& function : functions) {
    error.stack.frames.push_back({function, SourceLocation{"b.mc", line++, 1}});
  }
  error.location = error.stack.frames.front().location;
  return error;
}

TEST(DiffTest, IdenticalSetsGiveEmptyDiff) {
  const InvariantSet set = Set("\nppt f:::ENTER\ninv x >= 1\ninv p != null\n");
  const InvariantDiff diff = DiffInvariants(set, set);
  EXPECT_TRUE(diff.empty());
  ASSERT_EQ(diff.points.size(), 1u);
  EXPECT_EQ(diff.points[0].delta_count(), 0);
  EXPECT_EQ(RenderDiff(diff), "");
}

TEST(DiffTest, NullArgumentAtGetHwtype) {
  const InvariantSet stable = Set("\nppt get_hwtype:::ENTER\ninv name != null\n");
  const InvariantSet buggy = Set("\nppt get_hwtype:::ENTER\ninv name == null\n");
  const InvariantDiff diff = DiffInvariants(buggy, stable);
  EXPECT_EQ(AllLines(diff), (std::vector<std::string>{
                                "get_hwtype:::ENTER - name != null",
                                "get_hwtype:::ENTER + name == null",
                            }));
  EXPECT_EQ(RenderDiff(diff),
            "ppt get_hwtype:::ENTER\n- name != null\n+ name == null\n");
}

TEST(DiffTest, ParameterChangeWithinFamily) {
  const InvariantSet stable =
      Set("\nppt f:::EXIT\ninv x <= 5\ninv y == 2*x - 1\ninv z in {1, 2}\n");
  const InvariantSet buggy =
      Set("\nppt f:::EXIT\ninv x <= 7\ninv y == 2*x - 1\ninv z in {1, 3}\n");
  const InvariantDiff diff = DiffInvariants(buggy, stable);
  ASSERT_EQ(diff.points.size(), 1u);
  const PointDiff& point = diff.points[0];
  EXPECT_TRUE(point.only_in_buggy.empty());
  EXPECT_TRUE(point.only_in_stable.empty());
  ASSERT_EQ(point.changed.size(), 2u);
  EXPECT_EQ(point.Lines(), (std::vector<std::string>{"~ x <= 5 -> x <= 7",
                                                     "~ z in {1, 2} -> z in {1, 3}"}));
  for (const ChangedInvariant& change : point.changed) {
    EXPECT_EQ(change.stable.vars, change.buggy.vars);
    EXPECT_STREQ(change.stable.family(), change.buggy.family());
  }
}

TEST(DiffTest, UnmatchedPointsAreListedNotDiffed) {
  const InvariantSet stable =
      Set("\nppt main:::ENTER\ninv argc == 2\n\nppt xatou_mini:::EXIT\ninv return >= 0\n");
  const InvariantSet buggy = Set("\nppt main:::ENTER\ninv argc == 2\n\nppt z:::ENTER\n");
  const InvariantDiff diff = DiffInvariants(buggy, stable);
  ASSERT_EQ(diff.unmatched.size(), 2u);
  EXPECT_EQ(diff.unmatched[0].point.Identity(), "xatou_mini:::EXIT");
  EXPECT_EQ(diff.unmatched[0].side, DiffSide::kStableOnly);
  EXPECT_EQ(diff.unmatched[1].point.Identity(), "z:::ENTER");
  EXPECT_EQ(diff.unmatched[1].side, DiffSide::kBuggyOnly);
  EXPECT_EQ(diff.points.size(), 1u);
  EXPECT_FALSE(diff.empty());
  EXPECT_EQ(RenderDiff(diff),
            "unmatched xatou_mini:::EXIT only in stable\n"
            "unmatched z:::ENTER only in buggy\n");
}

// Pairs of related sets: inferred from independent random traces over the
// same function and variable names.
std::pair<InvariantSet, InvariantSet> RandomPair(testing::Rng& rng) {
  return {InferInvariants(testing::RandomTrace(rng), {}),
          InferInvariants(testing::RandomTrace(rng), {})};
}

std::vector<std::string> Rendered(const std::vector<InvariantInstance>& invs) {
  std::vector<std::string> out;
  for (const InvariantInstance& inv : invs) out.push_back(inv.Render());
  return out;
}

TEST(DiffLawTest, SymmetryAndSelfDiff) {
  testing::Rng rng(1);
  int nonempty = 0;
  for (int i = 0; i < 500; ++i) {
    const auto [a, b] = RandomPair(rng);
    EXPECT_TRUE(DiffInvariants(a, a).empty());
    const InvariantDiff ab = DiffInvariants(a, b);
    const InvariantDiff ba = DiffInvariants(b, a);
    nonempty += !ab.empty();
    ASSERT_EQ(ab.points.size(), ba.points.size());
    for (size_t p = 0; p < ab.points.size(); ++p) {
      EXPECT_EQ(Rendered(ab.points[p].only_in_buggy), Rendered(ba.points[p].only_in_stable));
      EXPECT_EQ(Rendered(ab.points[p].only_in_stable), Rendered(ba.points[p].only_in_buggy));
      ASSERT_EQ(ab.points[p].changed.size(), ba.points[p].changed.size());
      for (size_t c = 0; c < ab.points[p].changed.size(); ++c) {
        EXPECT_EQ(ab.points[p].changed[c].buggy.Render(),
                  ba.points[p].changed[c].stable.Render());
      }
    }
    ASSERT_EQ(ab.unmatched.size(), ba.unmatched.size());
    for (size_t u = 0; u < ab.unmatched.size(); ++u) {
      EXPECT_EQ(ab.unmatched[u].point, ba.unmatched[u].point);
      EXPECT_NE(ab.unmatched[u].side, ba.unmatched[u].side);
    }
  }
  EXPECT_GT(nonempty, 400);
}

// Oracle: the plain set difference of renderings, before pairing changes,
// must be exactly covered by the three categories.
TEST(DiffLawTest, CategoriesPartitionTheSetDifference) {
  testing::Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    const auto [buggy, stable] = RandomPair(rng);
    const InvariantDiff diff = DiffInvariants(buggy, stable);
    for (const PointDiff& point : diff.points) {
      std::set<std::string> b, s;
      for (const auto& p : buggy.points) {
        if (p.point == point.point) {
          for (const auto& inv : p.invariants) b.insert(inv.Render());
        }
      }
      for (const auto& p : stable.points) {
        if (p.point == point.point) {
          for (const auto& inv : p.invariants) s.insert(inv.Render());
        }
      }
      std::multiset<std::string> expected_buggy, expected_stable, got_buggy, got_stable;
      for (const auto& text : b) {
        if (!s.count(text)) expected_buggy.insert(text);
      }
      for (const auto& text : s) {
        if (!b.count(text)) expected_stable.insert(text);
      }
      for (const auto& inv : point.only_in_buggy) got_buggy.insert(inv.Render());
      for (const auto& inv : point.only_in_stable) got_stable.insert(inv.Render());
      for (const auto& change : point.changed) {
        got_buggy.insert(change.buggy.Render());
        got_stable.insert(change.stable.Render());
        EXPECT_EQ(change.stable.vars, change.buggy.vars);
        EXPECT_STREQ(change.stable.family(), change.buggy.family());
      }
      EXPECT_EQ(got_buggy, expected_buggy);
      EXPECT_EQ(got_stable, expected_stable);
    }
  }
}

TEST(RankTest, EmptyInputsGiveEmptyRanking) {
  const RootCauseReport report = RankRootCauses({}, {}, {});
  EXPECT_TRUE(report.ranking.empty());
  EXPECT_EQ(RenderRootCauseReport(report),
            "MEMORY ERRORS\n== ERROR SUMMARY: 0 errors\n\n"
            "INVARIANT DIFF\n(no differences)\n\n"
            "RANKED ROOT CAUSES\n(none)\n");
}

TEST(RankTest, StackMembershipOutweighsDeltas) {
  const InvariantSet stable = Set(
      "\nppt a:::ENTER\ninv x == 1\ninv y == 1\ninv z == 1\ninv w == 1\n"
      "\nppt b:::ENTER\ninv p != null\n");
  const InvariantSet buggy = Set("\nppt a:::ENTER\n\nppt b:::ENTER\n");
  const RootCauseReport report =
      RankRootCauses(DiffInvariants(buggy, stable), {ErrorIn({"b", "main"})}, {});
  ASSERT_GE(report.ranking.size(), 2u);
  EXPECT_EQ(report.ranking[0].point.Identity(), "b:::ENTER");
  EXPECT_DOUBLE_EQ(report.ranking[0].score, 11);
  EXPECT_TRUE(report.ranking[0].in_error_stack);
  EXPECT_EQ(report.ranking[1].point.Identity(), "a:::ENTER");
  EXPECT_DOUBLE_EQ(report.ranking[1].score, 4);
  EXPECT_FALSE(report.ranking[1].in_error_stack);
  EXPECT_EQ(RenderRootCauseReport(report).substr(
                RenderRootCauseReport(report).find("RANKED ROOT CAUSES")),
            "RANKED ROOT CAUSES\n"
            "1. b:::ENTER score=11 [in-error-stack] delta=1\n"
            "     - p != null\n"
            "     at b (b.mc:1)\n"
            "2. a:::ENTER score=4 delta=4\n"
            "     - w == 1\n"
            "     - x == 1\n"
            "     - y == 1\n"
            "     - z == 1\n");
}

TEST(RankTest, CustomWeights) {
  const InvariantSet stable = Set("\nppt a:::ENTER\ninv x == 1\ninv y == 1\n");
  const InvariantSet buggy = Set("\nppt a:::ENTER\n");
  RankWeights weights;
  weights.delta = 0.5;
  weights.in_stack = 3;
  const RootCauseReport report =
      RankRootCauses(DiffInvariants(buggy, stable), {ErrorIn({"a", "main"})}, weights);
  // main has no point in either set, so only a is ranked.
  ASSERT_EQ(report.ranking.size(), 1u);
  EXPECT_DOUBLE_EQ(report.ranking[0].score, 4);
  EXPECT_EQ(FormatScore(3.5), "3.5");
  EXPECT_EQ(FormatScore(11), "11");
}

std::vector<MemError> RandomErrors(testing::Rng& rng) {
  static const char* kFunctions[] = {"alpha", "beta", "gamma", "delta"};
  std::vector<MemError> errors;
  const int count = static_cast<int>(rng() % 3);
  for (int i = 0; i < count; ++i) {
    std::vector<std::string> stack;
    const int depth = 1 + static_cast<int>(rng() % 3);
    for (int d = 0; d < depth; ++d) stack.push_back(kFunctions[rng() % 4]);
    stack.push_back("main");
    errors.push_back(ErrorIn(stack));
  }
  return errors;
}

std::set<std::string> StackFunctions(const std::vector<MemError>& errors) {
  std::set<std::string> names;
  for (const MemError& error : errors) {
    for (const StackFrame& frame : error.stack.frames) names.insert(frame.function);
  }
  return names;
}

TEST(RankLawTest, ScoreLawOrderAndCoverage) {
  testing::Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const auto [buggy, stable] = RandomPair(rng);
    const InvariantDiff diff = DiffInvariants(buggy, stable);
    const auto errors = RandomErrors(rng);
    const RankWeights weights{1.0 + static_cast<double>(rng() % 3),
                              static_cast<double>(rng() % 20)};
    const RootCauseReport report = RankRootCauses(diff, errors, weights);
    const auto in_stack = StackFunctions(errors);
    std::map<std::string, int64_t> deltas;
    for (const PointDiff& point : diff.points) {
      if (point.delta_count() > 0) deltas[point.point.Identity()] = point.delta_count();
    }
    std::set<std::string> seen;
    for (size_t r = 0; r < report.ranking.size(); ++r) {
      const RootCauseEntry& entry = report.ranking[r];
      const std::string id = entry.point.Identity();
      EXPECT_TRUE(seen.insert(id).second) << id;
      EXPECT_EQ(entry.in_error_stack, in_stack.count(entry.point.function) > 0);
      EXPECT_EQ(entry.delta_count, deltas.count(id) ? deltas[id] : 0);
      EXPECT_DOUBLE_EQ(entry.score, weights.delta * entry.delta_count +
                                        weights.in_stack * entry.in_error_stack);
      EXPECT_TRUE(entry.delta_count > 0 || entry.in_error_stack) << id;
      if (r > 0) {
        const RootCauseEntry& prev = report.ranking[r - 1];
        EXPECT_TRUE(prev.score > entry.score ||
                    (prev.score == entry.score && prev.point.Identity() < id));
      }
    }
    // Every point with a delta is ranked.
    for (const auto& [id, delta] : deltas) EXPECT_TRUE(seen.count(id)) << id;
    EXPECT_EQ(RenderRootCauseReport(report),
              RenderRootCauseReport(RankRootCauses(diff, errors, weights)));
  }
}

TEST(RankLawTest, IncreasingDeltaNeverLowersRelativeRank) {
  testing::Rng rng(4);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const auto [buggy, stable] = RandomPair(rng);
    InvariantDiff diff = DiffInvariants(buggy, stable);
    if (diff.points.empty()) continue;
    const auto errors = RandomErrors(rng);
    const RootCauseReport before = RankRootCauses(diff, errors, {});
    PointDiff& target = diff.points[rng() % diff.points.size()];
    InvariantInstance extra{target.point, {"zz"}, LowerBound{0}, 3,
                            InvariantStatus::kJustified};
    target.only_in_buggy.push_back(extra);
    const std::string id = target.point.Identity();
    const RootCauseReport after = RankRootCauses(diff, errors, {});
    auto position = [](const RootCauseReport& report, const std::string& identity) {
      for (size_t r = 0; r < report.ranking.size(); ++r) {
        if (report.ranking[r].point.Identity() == identity) return static_cast<int>(r);
      }
      return -1;
    };
    const int target_after = position(after, id);
    ASSERT_GE(target_after, 0);
    const int target_before = position(before, id);
    for (const RootCauseEntry& other : before.ranking) {
      if (other.point.Identity() == id) continue;
      ++checked;
      if (target_before >= 0 && target_before < position(before, other.point.Identity())) {
        EXPECT_LT(target_after, position(after, other.point.Identity()));
      }
    }
  }
  EXPECT_GT(checked, 200);
}

TEST(CorpusRankTest, ArpTopEntryCarriesNullArgumentInCrashStack) {
  for (const CorpusCase& c : CorpusCases(MEMBUG_CORPUS_DIR)) {
    if (c.name != "arp_mini") continue;
    auto buggy = LoadProgram(c.buggy_path.string());
    auto stable = LoadProgram(c.fixed_path.string());
    ASSERT_TRUE(buggy.ok() && stable.ok());
    const PipelineResult result = RunPipeline(*buggy, *stable, c.target_args, {});
    ASSERT_TRUE(result.buggy_outcome.crashed());
    const auto crash_functions = StackFunctions({result.buggy_outcome.crash()});
    EXPECT_EQ(crash_functions, (std::set<std::string>{"my_strcmp", "get_hwtype",
                                                      "arp_main", "main"}));
    ASSERT_FALSE(result.report.ranking.empty());
    const RootCauseEntry& top = result.report.ranking[0];
    EXPECT_TRUE(crash_functions.count(top.point.function));
    EXPECT_EQ(top.point.Identity(), "get_hwtype:::ENTER");
    EXPECT_NE(std::find(top.evidence.begin(), top.evidence.end(), "- name != null"),
              top.evidence.end());
    return;
  }
  FAIL() << "arp_mini missing";
}

TEST(CorpusRankTest, TopCrashTruncatesExitPoints) {
  for (const CorpusCase& c : CorpusCases(MEMBUG_CORPUS_DIR)) {
    if (c.name != "top_mini") continue;
    auto buggy = LoadProgram(c.buggy_path.string());
    auto stable = LoadProgram(c.fixed_path.string());
    ASSERT_TRUE(buggy.ok() && stable.ok());
    const PipelineResult result = RunPipeline(*buggy, *stable, c.target_args, {});
    std::set<std::string> stable_only;
    for (const UnmatchedPoint& point : result.report.diff.unmatched) {
      if (point.side == DiffSide::kStableOnly) stable_only.insert(point.point.Identity());
    }
    EXPECT_TRUE(stable_only.count("top_main:::EXIT"));
    EXPECT_TRUE(stable_only.count("main:::EXIT"));
    const RootCauseEntry& top = result.report.ranking.at(0);
    EXPECT_EQ(top.point.Identity(), "xatou_mini:::ENTER");
    EXPECT_TRUE(top.in_error_stack);
    return;
  }
  FAIL() << "top_mini missing";
}

TEST(JsonTest, ReportMirrorsThreeSections) {
  const InvariantSet stable = Set("\nppt b:::ENTER\ninv p != null\n");
  const InvariantSet buggy = Set("\nppt b:::ENTER\n\nppt c:::EXIT\n");
  const RootCauseReport report =
      RankRootCauses(DiffInvariants(buggy, stable), {ErrorIn({"b", "main"})}, {});
  const nlohmann::json json = nlohmann::json::parse(ReportToJson(report).dump());
  ASSERT_EQ(json["memoryErrors"].size(), 1u);
  EXPECT_EQ(json["memoryErrors"][0]["kind"], "InvalidRead");
  EXPECT_EQ(json["invariantDiff"]["unmatchedPoints"].size(), 1u);
  ASSERT_EQ(json["rankedRootCauses"].size(), 1u);
  EXPECT_EQ(json["rankedRootCauses"][0]["point"], "b:::ENTER");
  EXPECT_EQ(json["rankedRootCauses"][0]["score"], 11);
}

}  // namespace
}  // namespace membug
