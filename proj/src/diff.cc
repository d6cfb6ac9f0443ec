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

#include "membug/diff.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "membug/report.h"

namespace membug {
namespace {

using Key = std::pair<std::vector<std::string>, std::string>;

std::map<Key, std::vector<const InvariantInstance*>> ByKey(
    const std::vector<InvariantInstance>& invariants) {
  std::map<Key, std::vector<const InvariantInstance*>> groups;
  for (const InvariantInstance& inv : invariants) {
    groups[{inv.vars, inv.family()}].push_back(&inv);
  }
  return groups;
}

PointDiff DiffPoint(const PointInvariants& buggy, const PointInvariants& stable) {
  PointDiff diff;
  diff.point = buggy.point;
  auto buggy_groups = ByKey(buggy.invariants);
  auto stable_groups = ByKey(stable.invariants);
  std::set<Key> keys;
  for (const auto& [key, group] : buggy_groups) keys.insert(key);
  for (const auto& [key, group] : stable_groups) keys.insert(key);
  for (const Key& key : keys) {
    std::vector<const InvariantInstance*> b = buggy_groups[key];
    std::vector<const InvariantInstance*> s = stable_groups[key];
    std::set<std::string> b_text, s_text;
    for (const auto* inv : b) b_text.insert(inv->Render());
    for (const auto* inv : s) s_text.insert(inv->Render());
    std::erase_if(b, [&](const auto* inv) { return s_text.count(inv->Render()); });
    std::erase_if(s, [&](const auto* inv) { return b_text.count(inv->Render()); });
    if (b.size() == 1 && s.size() == 1) {
      diff.changed.push_back(ChangedInvariant{*s[0], *b[0]});
      continue;
    }
    for (const auto* inv : b) diff.only_in_buggy.push_back(*inv);
    for (const auto* inv : s) diff.only_in_stable.push_back(*inv);
  }
  std::sort(diff.only_in_buggy.begin(), diff.only_in_buggy.end(), CanonicalLess);
  std::sort(diff.only_in_stable.begin(), diff.only_in_stable.end(), CanonicalLess);
  return diff;
}

const char* SideName(DiffSide side) {
  return side == DiffSide::kBuggyOnly ? "buggy" : "stable";
}

std::string UnmatchedLine(const UnmatchedPoint& point) {
  return "point only in " + std::string(SideName(point.side));
}

nlohmann::json LocationJson(const SourceLocation& loc) {
  return {{"file", loc.file}, {"line", loc.line}, {"column", loc.column}};
}

std::string RenderFrame(const StackFrame& frame) {
  return "at " + frame.function + " (" + frame.location.file + ":" +
         std::to_string(frame.location.line) + ")";
}

}  // namespace

std::vector<std::string> PointDiff::Lines() const {
  std::vector<std::string> lines;
  for (const auto& inv : only_in_stable) lines.push_back("- " + inv.Render());
  for (const auto& inv : only_in_buggy) lines.push_back("+ " + inv.Render());
  for (const auto& change : changed) {
    lines.push_back("~ " + change.stable.Render() + " -> " + change.buggy.Render());
  }
  return lines;
}

bool InvariantDiff::empty() const {
  return unmatched.empty() &&
         std::all_of(points.begin(), points.end(),
                     [](const PointDiff& p) { return p.delta_count() == 0; });
}

InvariantDiff DiffInvariants(const InvariantSet& buggy, const InvariantSet& stable) {
  std::map<std::string, const PointInvariants*> b, s;
  for (const auto& p : buggy.points) b[p.point.Identity()] = &p;
  for (const auto& p : stable.points) s[p.point.Identity()] = &p;
  InvariantDiff diff;
  for (const auto& [identity, point] : b) {
    auto it = s.find(identity);
    if (it == s.end()) {
      diff.unmatched.push_back({point->point, DiffSide::kBuggyOnly});
    } else {
      diff.points.push_back(DiffPoint(*point, *it->second));
    }
  }
  for (const auto& [identity, point] : s) {
    if (!b.count(identity)) {
      diff.unmatched.push_back({point->point, DiffSide::kStableOnly});
    }
  }
  std::sort(diff.unmatched.begin(), diff.unmatched.end(),
            [](const UnmatchedPoint& x, const UnmatchedPoint& y) {
              return x.point.Identity() < y.point.Identity();
            });
  return diff;
}

RootCauseReport RankRootCauses(InvariantDiff diff, std::vector<MemError> errors,
                               const RankWeights& weights) {
  RootCauseReport report;
  report.mem_errors = std::move(errors);
  report.diff = std::move(diff);

  auto make_entry = [&](const ProgramPoint& point, int64_t delta,
                        std::vector<std::string> evidence) {
    RootCauseEntry entry;
    entry.point = point;
    entry.delta_count = delta;
    entry.evidence = std::move(evidence);
    for (const MemError& error : report.mem_errors) {
      for (const StackFrame& frame : error.stack.frames) {
        if (frame.function != point.function) continue;
        entry.in_error_stack = true;
        if (std::find(entry.frames.begin(), entry.frames.end(), frame) ==
            entry.frames.end()) {
          entry.frames.push_back(frame);
        }
      }
    }
    entry.score = weights.delta * static_cast<double>(delta) +
                  weights.in_stack * (entry.in_error_stack ? 1.0 : 0.0);
    if (entry.delta_count > 0 || entry.in_error_stack) {
      report.ranking.push_back(std::move(entry));
    }
  };
  for (const PointDiff& point : report.diff.points) {
    make_entry(point.point, point.delta_count(), point.Lines());
  }
  for (const UnmatchedPoint& point : report.diff.unmatched) {
    make_entry(point.point, 0, {UnmatchedLine(point)});
  }
  std::sort(report.ranking.begin(), report.ranking.end(),
            [](const RootCauseEntry& a, const RootCauseEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.point.Identity() < b.point.Identity();
            });
  return report;
}

std::string FormatScore(double score) {
  if (std::isfinite(score) && score == std::trunc(score) &&
      std::fabs(score) < 1e15) {
    return std::to_string(static_cast<int64_t>(score));
  }
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), score);
  return std::string(buffer, end);
}

std::string RenderDiff(const InvariantDiff& diff) {
  std::ostringstream out;
  bool first = true;
  for (const PointDiff& point : diff.points) {
    if (point.delta_count() == 0) continue;
    if (!first) out << "\n";
    first = false;
    out << "ppt " << point.point.Identity() << "\n";
    for (const std::string& line : point.Lines()) out << line << "\n";
  }
  if (!diff.unmatched.empty()) {
    if (!first) out << "\n";
    for (const UnmatchedPoint& point : diff.unmatched) {
      out << "unmatched " << point.point.Identity() << " only in "
          << SideName(point.side) << "\n";
    }
  }
  return out.str();
}

std::string RenderRootCauseReport(const RootCauseReport& report) {
  std::ostringstream out;
  out << "MEMORY ERRORS\n";
  out << RenderMemErrors(report.mem_errors);
  if (!report.mem_errors.empty()) out << "==\n";
  out << "== ERROR SUMMARY: " << report.mem_errors.size() << " errors\n";

  out << "\nINVARIANT DIFF\n";
  const std::string diff = RenderDiff(report.diff);
  out << (diff.empty() ? "(no differences)\n" : diff);

  out << "\nRANKED ROOT CAUSES\n";
  if (report.ranking.empty()) out << "(none)\n";
  for (size_t i = 0; i < report.ranking.size(); ++i) {
    const RootCauseEntry& entry = report.ranking[i];
    out << (i + 1) << ". " << entry.point.Identity()
        << " score=" << FormatScore(entry.score)
        << (entry.in_error_stack ? " [in-error-stack]" : "")
        << " delta=" << entry.delta_count << "\n";
    for (const std::string& line : entry.evidence) out << "     " << line << "\n";
    for (const StackFrame& frame : entry.frames) {
      out << "     " << RenderFrame(frame) << "\n";
    }
  }
  return out.str();
}

nlohmann::json DiffToJson(const InvariantDiff& diff) {
  nlohmann::json points = nlohmann::json::array();
  for (const PointDiff& point : diff.points) {
    if (point.delta_count() == 0) continue;
    nlohmann::json only_buggy = nlohmann::json::array();
    nlohmann::json only_stable = nlohmann::json::array();
    nlohmann::json changed = nlohmann::json::array();
    for (const auto& inv : point.only_in_buggy) only_buggy.push_back(inv.Render());
    for (const auto& inv : point.only_in_stable) only_stable.push_back(inv.Render());
    for (const auto& c : point.changed) {
      changed.push_back({{"stable", c.stable.Render()}, {"buggy", c.buggy.Render()}});
    }
    points.push_back({{"point", point.point.Identity()},
                      {"onlyInBuggy", only_buggy},
                      {"onlyInStable", only_stable},
                      {"changed", changed}});
  }
  nlohmann::json unmatched = nlohmann::json::array();
  for (const UnmatchedPoint& point : diff.unmatched) {
    unmatched.push_back(
        {{"point", point.point.Identity()}, {"side", SideName(point.side)}});
  }
  return {{"points", points}, {"unmatchedPoints", unmatched}};
}

nlohmann::json ReportToJson(const RootCauseReport& report) {
  nlohmann::json errors = nlohmann::json::array();
  for (const MemError& error : report.mem_errors) {
    errors.push_back(MemErrorToJson(error));
  }
  nlohmann::json ranking = nlohmann::json::array();
  for (size_t i = 0; i < report.ranking.size(); ++i) {
    const RootCauseEntry& entry = report.ranking[i];
    nlohmann::json frames = nlohmann::json::array();
    for (const StackFrame& frame : entry.frames) {
      frames.push_back(
          {{"function", frame.function}, {"location", LocationJson(frame.location)}});
    }
    ranking.push_back({{"rank", i + 1},
                       {"point", entry.point.Identity()},
                       {"score", entry.score},
                       {"inErrorStack", entry.in_error_stack},
                       {"delta", entry.delta_count},
                       {"evidence", entry.evidence},
                       {"frames", frames}});
  }
  return {{"memoryErrors", errors},
          {"invariantDiff", DiffToJson(report.diff)},
          {"rankedRootCauses", ranking}};
}

}  // namespace membug
