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

#include "support/invariant_oracle.h"

#include <algorithm>
#include <map>
#include <set>

namespace membug::testing {
namespace {

using Column = std::vector<const VarObservation*>;

bool AllDefined(const Column& column) {
  return std::all_of(column.begin(), column.end(),
                     [](const VarObservation* o) { return o->defined(); });
}

int64_t IntAt(const Column& c, size_t i) { return std::get<int64_t>(c[i]->value); }
Address AddrAt(const Column& c, size_t i) { return std::get<Address>(c[i]->value); }
const std::vector<int64_t>& ElementsAt(const Column& c, size_t i) {
  return std::get<ArrayValue>(c[i]->value).elements;
}

template <typename Pred>
bool Every(size_t n, Pred pred) {
  for (size_t i = 0; i < n; ++i) {
    if (!pred(i)) return false;
  }
  return true;
}

// Candidate lines through every pair of samples with distinct x, kept if the
// line passes through every sample.
std::vector<LinearBinary> Lines(const Column& x, const Column& y) {
  std::set<std::pair<std::pair<int64_t, int64_t>, std::pair<int64_t, int64_t>>> seen;
  std::vector<LinearBinary> lines;
  const size_t n = x.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      const __int128 dx = static_cast<__int128>(IntAt(x, j)) - IntAt(x, i);
      const __int128 dy = static_cast<__int128>(IntAt(y, j)) - IntAt(y, i);
      if (dx == 0) continue;
      auto a = Rational::Make(dy, dx);
      if (!a || a->is_zero()) continue;
      auto b = Rational::Make(
          static_cast<__int128>(IntAt(y, i)) * a->den() -
              static_cast<__int128>(a->num()) * IntAt(x, i),
          a->den());
      if (!b) continue;
      if (*a == Rational(1) && b->is_zero()) continue;
      const bool fits = Every(n, [&](size_t k) {
        const __int128 lhs = static_cast<__int128>(IntAt(y, k)) * a->den() * b->den();
        const __int128 rhs =
            static_cast<__int128>(a->num()) * IntAt(x, k) * b->den() +
            static_cast<__int128>(b->num()) * a->den();
        return lhs == rhs;
      });
      if (!fits) continue;
      if (seen.insert({{a->num(), a->den()}, {b->num(), b->den()}}).second) {
        lines.push_back(LinearBinary{*a, *b});
      }
    }
  }
  return lines;
}

std::vector<InvariantInstance> Enumerate(const ProgramPoint& point,
                                         const std::vector<const TraceSample*>& samples,
                                         const InferenceConfig& config) {
  std::vector<InvariantInstance> found;
  const size_t n = samples.size();
  if (n == 0 || static_cast<int>(n) < config.min_samples) return found;
  const auto& schema = samples[0]->observations;
  std::vector<Column> columns(schema.size());
  for (size_t v = 0; v < schema.size(); ++v) {
    for (const TraceSample* s : samples) columns[v].push_back(&s->observations[v]);
  }
  auto add = [&](std::vector<std::string> vars, InvariantTemplate tmpl) {
    InvariantInstance inv{point, std::move(vars), std::move(tmpl)};
    inv.samples_seen = static_cast<int64_t>(n);
    inv.status = InvariantStatus::kJustified;
    found.push_back(std::move(inv));
  };

  for (size_t v = 0; v < schema.size(); ++v) {
    const Column& c = columns[v];
    if (!AllDefined(c)) continue;
    const std::string& name = schema[v].name;
    switch (schema[v].kind) {
      case VarKind::kInt: {
        std::set<int64_t> distinct;
        for (size_t i = 0; i < n; ++i) distinct.insert(IntAt(c, i));
        if (distinct.size() == 1) add({name}, Constant{Scalar(*distinct.begin())});
        add({name}, LowerBound{*distinct.begin()});
        add({name}, UpperBound{*distinct.rbegin()});
        if (static_cast<int>(distinct.size()) <= config.max_one_of_size) {
          add({name}, OneOfSet{{distinct.begin(), distinct.end()}});
        }
        break;
      }
      case VarKind::kPtr: {
        if (Every(n, [&](size_t i) { return AddrAt(c, i) == AddrAt(c, 0); })) {
          add({name}, Constant{Scalar(AddrAt(c, 0))});
        }
        if (Every(n, [&](size_t i) { return !AddrAt(c, i).is_null(); })) {
          add({name}, NonNull{});
        }
        if (Every(n, [&](size_t i) { return AddrAt(c, i).is_null(); })) {
          add({name}, IsNull{});
        }
        break;
      }
      case VarKind::kIntArray:
      case VarKind::kCharArray: {
        auto every_adjacent = [&](auto relation) {
          return Every(n, [&](size_t i) {
            const auto& e = ElementsAt(c, i);
            for (size_t k = 1; k < e.size(); ++k) {
              if (!relation(e[k - 1], e[k])) return false;
            }
            return true;
          });
        };
        if (every_adjacent([](int64_t p, int64_t q) { return p <= q; })) {
          add({name}, SortedAsc{});
        }
        if (every_adjacent([](int64_t p, int64_t q) { return p >= q; })) {
          add({name}, SortedDesc{});
        }
        if (every_adjacent([](int64_t p, int64_t q) { return p == q; })) {
          add({name}, AllElementsEqual{});
        }
        std::set<int64_t> all;
        for (size_t i = 0; i < n; ++i) {
          for (int64_t e : ElementsAt(c, i)) all.insert(e);
        }
        if (!all.empty()) add({name}, ElementsInRange{*all.begin(), *all.rbegin()});
        break;
      }
    }
  }

  for (size_t i = 0; i < schema.size(); ++i) {
    for (size_t j = 0; j < schema.size(); ++j) {
      if (i == j || schema[i].kind != schema[j].kind) continue;
      const Column& x = columns[i];
      const Column& y = columns[j];
      if (!AllDefined(x) || !AllDefined(y)) continue;
      const std::vector<std::string> vars = {schema[i].name, schema[j].name};
      if (schema[i].kind == VarKind::kInt) {
        if (Every(n, [&](size_t k) { return IntAt(x, k) < IntAt(y, k); })) {
          add(vars, LessThan{});
        }
        if (Every(n, [&](size_t k) { return IntAt(x, k) <= IntAt(y, k); })) {
          add(vars, LessEq{});
        }
        if (i < j) {
          if (Every(n, [&](size_t k) { return IntAt(x, k) == IntAt(y, k); })) {
            add(vars, EqualVars{});
          }
          for (const LinearBinary& line : Lines(x, y)) add(vars, line);
        }
      } else if (schema[i].kind == VarKind::kPtr && i < j) {
        if (Every(n, [&](size_t k) { return AddrAt(x, k) == AddrAt(y, k); })) {
          add(vars, EqualVars{});
        }
      }
    }
  }
  return found;
}

// The suppression table, applied to a complete justified list.
std::vector<InvariantInstance> ApplySuppression(
    const std::vector<InvariantInstance>& all) {
  std::map<std::vector<std::string>, std::set<std::string>> families;
  std::map<std::vector<std::string>, Scalar> constants;
  for (const auto& inv : all) {
    families[inv.vars].insert(FamilyName(inv.tmpl));
    if (const auto* c = std::get_if<Constant>(&inv.tmpl)) constants[inv.vars] = c->value;
  }
  std::vector<InvariantInstance> kept;
  for (const auto& inv : all) {
    const std::string family = FamilyName(inv.tmpl);
    const auto& present = families[inv.vars];
    auto constant = constants.find(inv.vars);
    const bool has_constant = constant != constants.end();
    bool drop = false;
    if (family == "LessEq" && present.count("LessThan")) drop = true;
    if ((family == "LowerBound" || family == "UpperBound" || family == "OneOfSet") &&
        has_constant) {
      drop = true;
    }
    if (family == "NonNull" && has_constant &&
        !std::get<Address>(constant->second).is_null()) {
      drop = true;
    }
    if (family == "IsNull" && has_constant &&
        std::get<Address>(constant->second).is_null()) {
      drop = true;
    }
    if (family == "ElementsInRange" && present.count("AllElementsEqual")) drop = true;
    if (!drop) kept.push_back(inv);
  }
  return kept;
}

}  // namespace

InvariantSet OracleInfer(const Trace& trace, const InferenceConfig& config) {
  std::map<std::string, std::pair<ProgramPoint, std::vector<const TraceSample*>>>
      groups;
  for (const TraceSample& sample : trace.samples) {
    auto& group = groups[sample.point.Identity()];
    group.first = sample.point;
    group.second.push_back(&sample);
  }
  InvariantSet set;
  set.trace_name = trace.program;
  set.config = config;
  for (const auto& [identity, group] : groups) {
    std::vector<InvariantInstance> found = Enumerate(group.first, group.second, config);
    if (config.enable_suppression) found = ApplySuppression(found);
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
      if (a.vars != b.vars) return a.vars < b.vars;
      const std::string fa = FamilyName(a.tmpl), fb = FamilyName(b.tmpl);
      if (fa != fb) return fa < fb;
      return a.Render() < b.Render();
    });
    set.points.push_back(PointInvariants{group.first, std::move(found)});
  }
  return set;
}

}  // namespace membug::testing
