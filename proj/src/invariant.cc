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

#include "membug/invariant.h"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

namespace membug {
namespace {

constexpr int64_t kInt64Max = std::numeric_limits<int64_t>::max();
constexpr int64_t kInt64Min = std::numeric_limits<int64_t>::min();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const VarObservation* Find(const TraceSample& sample, const std::string& name) {
  for (const VarObservation& obs : sample.observations) {
    if (obs.name == name) return &obs;
  }
  return nullptr;
}

std::string RenderScalar(const Scalar& value) {
  if (const auto* v = std::get_if<int64_t>(&value)) return std::to_string(*v);
  const Address& addr = std::get<Address>(value);
  return addr.is_null() ? "null" : addr.ToString();
}

std::optional<Scalar> ScalarOf(const VarObservation& obs) {
  if (const auto* v = std::get_if<int64_t>(&obs.value)) return Scalar(*v);
  if (const auto* a = std::get_if<Address>(&obs.value)) return Scalar(*a);
  return std::nullopt;
}

std::string RenderLinear(const std::string& x, const std::string& y,
                         const LinearBinary& line) {
  std::string out = y + " == " + line.a.ToString() + "*" + x;
  if (!line.b.is_zero()) {
    std::string b = line.b.ToString();
    if (line.b.is_negative()) {
      out += " - " + b.substr(1);
    } else {
      out += " + " + b;
    }
  }
  return out;
}

bool IsIdentity(const LinearBinary& line) {
  return line.a == Rational(1) && line.b.is_zero();
}

std::optional<int64_t> ParseInt(std::string_view text) {
  int64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) return std::nullopt;
  return value;
}

bool IsInt(const VarObservation* obs) {
  return obs && std::holds_alternative<int64_t>(obs->value);
}

// Linear candidate whose coefficients are unknown until a sample with a new x
// value arrives.
struct PendingLinear {
  std::vector<std::string> vars;
  int64_t x0 = 0;
  int64_t y0 = 0;
  int64_t samples_seen = 0;
  bool alive = true;
};

class PointInference {
 public:
  PointInference(ProgramPoint point, const InferenceConfig& config)
      : point_(std::move(point)), config_(config) {}

  void Add(const TraceSample& sample) {
    if (!started_) {
      Instantiate(sample);
      started_ = true;
    }
    for (InvariantInstance& instance : live_) {
      if (instance.status != InvariantStatus::kFalsified) {
        CheckInvariant(instance, sample, config_.max_one_of_size);
      }
    }
    for (PendingLinear& pending : pending_) {
      if (pending.alive) Feed(pending, sample);
    }
  }

  PointInvariants Finish() {
    PointInvariants result{point_, {}};
    for (InvariantInstance& instance : live_) {
      if (instance.status == InvariantStatus::kFalsified) continue;
      if (instance.samples_seen < config_.min_samples) continue;
      if (const auto* range = std::get_if<ElementsInRange>(&instance.tmpl)) {
        if (range->lo > range->hi) continue;
      }
      instance.status = InvariantStatus::kJustified;
      result.invariants.push_back(std::move(instance));
    }
    if (config_.enable_suppression) {
      result.invariants = Suppress(std::move(result.invariants));
    }
    std::sort(result.invariants.begin(), result.invariants.end(), CanonicalLess);
    return result;
  }

 private:
  void Instantiate(const TraceSample& first) {
    const auto& obs = first.observations;
    for (size_t i = 0; i < obs.size(); ++i) {
      const std::string& name = obs[i].name;
      const auto initial = ScalarOf(obs[i]);
      switch (obs[i].kind) {
        case VarKind::kInt: {
          const int64_t v = initial ? std::get<int64_t>(*initial) : 0;
          Unary(name, Constant{Scalar(v)});
          Unary(name, LowerBound{v});
          Unary(name, UpperBound{v});
          Unary(name, OneOfSet{});
          break;
        }
        case VarKind::kPtr: {
          const Address a = initial ? std::get<Address>(*initial) : Address{};
          Unary(name, Constant{Scalar(a)});
          Unary(name, NonNull{});
          Unary(name, IsNull{});
          break;
        }
        case VarKind::kIntArray:
        case VarKind::kCharArray:
          Unary(name, SortedAsc{});
          Unary(name, SortedDesc{});
          Unary(name, AllElementsEqual{});
          Unary(name, ElementsInRange{kInt64Max, kInt64Min});
          break;
      }
    }
    for (size_t i = 0; i < obs.size(); ++i) {
      for (size_t j = 0; j < obs.size(); ++j) {
        if (i == j || obs[i].kind != obs[j].kind) continue;
        const std::vector<std::string> vars = {obs[i].name, obs[j].name};
        if (obs[i].kind == VarKind::kInt) {
          Binary(vars, LessThan{});
          Binary(vars, LessEq{});
          if (i < j) {
            Binary(vars, EqualVars{});
            PendingLinear pending;
            pending.vars = vars;
            if (IsInt(&obs[i]) && IsInt(&obs[j])) {
              pending.x0 = std::get<int64_t>(obs[i].value);
              pending.y0 = std::get<int64_t>(obs[j].value);
            }
            pending_.push_back(std::move(pending));
          }
        } else if (obs[i].kind == VarKind::kPtr && i < j) {
          Binary(vars, EqualVars{});
        }
      }
    }
  }

  void Unary(const std::string& name, InvariantTemplate tmpl) {
    live_.push_back(InvariantInstance{point_, {name}, std::move(tmpl)});
  }
  void Binary(const std::vector<std::string>& vars, InvariantTemplate tmpl) {
    live_.push_back(InvariantInstance{point_, vars, std::move(tmpl)});
  }

  void Feed(PendingLinear& pending, const TraceSample& sample) {
    const VarObservation* x = Find(sample, pending.vars[0]);
    const VarObservation* y = Find(sample, pending.vars[1]);
    if (!IsInt(x) || !IsInt(y)) {
      pending.alive = false;
      return;
    }
    const int64_t xv = std::get<int64_t>(x->value);
    const int64_t yv = std::get<int64_t>(y->value);
    if (xv == pending.x0) {
      if (yv == pending.y0) {
        ++pending.samples_seen;
      } else {
        pending.alive = false;
      }
      return;
    }
    pending.alive = false;
    auto line = FitLinear({pending.x0, pending.y0}, {xv, yv});
    if (!line || IsIdentity(*line)) return;
    InvariantInstance instance{point_, pending.vars, *line};
    instance.samples_seen = pending.samples_seen + 1;
    live_.push_back(std::move(instance));
  }

  ProgramPoint point_;
  const InferenceConfig& config_;
  bool started_ = false;
  std::vector<InvariantInstance> live_;
  std::vector<PendingLinear> pending_;
};

}  // namespace

const char* FamilyName(const InvariantTemplate& tmpl) {
  static constexpr const char* kNames[] = {
      "Constant",   "NonNull",      "IsNull",     "LowerBound",
      "UpperBound", "OneOfSet",     "EqualVars",  "LessThan",
      "LessEq",     "LinearBinary", "SortedAsc",  "SortedDesc",
      "AllElementsEqual", "ElementsInRange"};
  static_assert(std::size(kNames) == std::variant_size_v<InvariantTemplate>);
  return kNames[tmpl.index()];
}

std::string InvariantInstance::Render() const {
  const std::string& v = vars[0];
  return std::visit(
      Overloaded{
          [&](const Constant& t) { return v + " == " + RenderScalar(t.value); },
          [&](const NonNull&) { return v + " != null"; },
          [&](const IsNull&) { return v + " is null"; },
          [&](const LowerBound& t) { return v + " >= " + std::to_string(t.lo); },
          [&](const UpperBound& t) { return v + " <= " + std::to_string(t.hi); },
          [&](const OneOfSet& t) {
            std::string out = v + " in {";
            for (size_t i = 0; i < t.values.size(); ++i) {
              if (i > 0) out += ", ";
              out += std::to_string(t.values[i]);
            }
            return out + "}";
          },
          [&](const EqualVars&) { return v + " == " + vars[1]; },
          [&](const LessThan&) { return v + " < " + vars[1]; },
          [&](const LessEq&) { return v + " <= " + vars[1]; },
          [&](const LinearBinary& t) { return RenderLinear(v, vars[1], t); },
          [&](const SortedAsc&) { return v + " sorted asc"; },
          [&](const SortedDesc&) { return v + " sorted desc"; },
          [&](const AllElementsEqual&) { return v + " elements equal"; },
          [&](const ElementsInRange& t) {
            return v + " elements in [" + std::to_string(t.lo) + ", " +
                   std::to_string(t.hi) + "]";
          },
      },
      tmpl);
}

bool CanonicalLess(const InvariantInstance& a, const InvariantInstance& b) {
  if (a.vars != b.vars) return a.vars < b.vars;
  const std::string fa = a.family();
  const std::string fb = b.family();
  if (fa != fb) return fa < fb;
  return a.Render() < b.Render();
}

std::optional<LinearBinary> FitLinear(std::pair<int64_t, int64_t> p1,
                                      std::pair<int64_t, int64_t> p2) {
  const __int128 dx = static_cast<__int128>(p2.first) - p1.first;
  const __int128 dy = static_cast<__int128>(p2.second) - p1.second;
  if (dx == 0 || dy == 0) return std::nullopt;
  auto a = Rational::Make(dy, dx);
  if (!a) return std::nullopt;
  // b = y1 - a*x1 = (y1*den - num*x1) / den.
  const __int128 num = static_cast<__int128>(p1.second) * a->den() -
                       static_cast<__int128>(a->num()) * p1.first;
  auto b = Rational::Make(num, a->den());
  if (!b) return std::nullopt;
  return LinearBinary{*a, *b};
}

bool LinearHolds(const LinearBinary& line, int64_t x, int64_t y) {
  // y == (an/ad)*x + (bn/bd)  <=>  y*ad*bd == an*x*bd + bn*ad.
  __int128 lhs, t1, t2;
  const __int128 ad = line.a.den();
  const __int128 bd = line.b.den();
  if (__builtin_mul_overflow(static_cast<__int128>(y), ad * bd, &lhs)) return false;
  if (__builtin_mul_overflow(static_cast<__int128>(line.a.num()) * x, bd, &t1)) {
    return false;
  }
  if (__builtin_mul_overflow(static_cast<__int128>(line.b.num()), ad, &t2)) {
    return false;
  }
  __int128 rhs;
  if (__builtin_add_overflow(t1, t2, &rhs)) return false;
  return lhs == rhs;
}

CheckResult CheckInvariant(InvariantInstance& instance, const TraceSample& sample,
                           int max_one_of_size) {
  std::vector<const VarObservation*> obs;
  for (const std::string& name : instance.vars) {
    const VarObservation* o = Find(sample, name);
    if (o == nullptr || !o->defined()) {
      instance.status = InvariantStatus::kFalsified;
      return CheckResult::kFalsified;
    }
    obs.push_back(o);
  }
  auto as_int = [&](size_t i) { return std::get<int64_t>(obs[i]->value); };
  auto as_addr = [&](size_t i) { return std::get<Address>(obs[i]->value); };
  auto elements = [&]() -> const std::vector<int64_t>& {
    return std::get<ArrayValue>(obs[0]->value).elements;
  };
  const bool holds = std::visit(
      Overloaded{
          [&](const Constant& t) { return ScalarOf(*obs[0]) == t.value; },
          [&](const NonNull&) { return !as_addr(0).is_null(); },
          [&](const IsNull&) { return as_addr(0).is_null(); },
          [&](LowerBound& t) {
            t.lo = std::min(t.lo, as_int(0));
            return true;
          },
          [&](UpperBound& t) {
            t.hi = std::max(t.hi, as_int(0));
            return true;
          },
          [&](OneOfSet& t) {
            const int64_t v = as_int(0);
            auto it = std::lower_bound(t.values.begin(), t.values.end(), v);
            if (it == t.values.end() || *it != v) t.values.insert(it, v);
            return static_cast<int>(t.values.size()) <= max_one_of_size;
          },
          [&](const EqualVars&) { return ScalarOf(*obs[0]) == ScalarOf(*obs[1]); },
          [&](const LessThan&) { return as_int(0) < as_int(1); },
          [&](const LessEq&) { return as_int(0) <= as_int(1); },
          [&](const LinearBinary& t) { return LinearHolds(t, as_int(0), as_int(1)); },
          [&](const SortedAsc&) {
            return std::is_sorted(elements().begin(), elements().end());
          },
          [&](const SortedDesc&) {
            return std::is_sorted(elements().begin(), elements().end(),
                                  std::greater<>());
          },
          [&](const AllElementsEqual&) {
            const auto& e = elements();
            return std::adjacent_find(e.begin(), e.end(), std::not_equal_to<>()) ==
                   e.end();
          },
          [&](ElementsInRange& t) {
            for (int64_t e : elements()) {
              t.lo = std::min(t.lo, e);
              t.hi = std::max(t.hi, e);
            }
            return true;
          },
      },
      instance.tmpl);
  if (!holds) {
    instance.status = InvariantStatus::kFalsified;
    return CheckResult::kFalsified;
  }
  ++instance.samples_seen;
  return CheckResult::kHolds;
}

std::vector<InvariantInstance> Suppress(std::vector<InvariantInstance> invariants) {
  auto has = [&](const std::vector<std::string>& vars, auto predicate) {
    return std::any_of(invariants.begin(), invariants.end(),
                       [&](const InvariantInstance& inv) {
                         return inv.vars == vars && predicate(inv.tmpl);
                       });
  };
  auto is = [](auto tag) {
    return [](const InvariantTemplate& t) {
      return std::holds_alternative<decltype(tag)>(t);
    };
  };
  auto constant_of = [&](const std::vector<std::string>& vars)
      -> std::optional<Scalar> {
    for (const InvariantInstance& inv : invariants) {
      if (inv.vars != vars) continue;
      if (const auto* c = std::get_if<Constant>(&inv.tmpl)) return c->value;
    }
    return std::nullopt;
  };
  std::vector<InvariantInstance> kept;
  for (const InvariantInstance& inv : invariants) {
    const auto& t = inv.tmpl;
    bool drop = false;
    if (std::holds_alternative<LessEq>(t)) {
      drop = has(inv.vars, is(LessThan{}));
    } else if (std::holds_alternative<LowerBound>(t) ||
               std::holds_alternative<UpperBound>(t) ||
               std::holds_alternative<OneOfSet>(t)) {
      drop = constant_of(inv.vars).has_value();
    } else if (std::holds_alternative<NonNull>(t)) {
      auto c = constant_of(inv.vars);
      drop = c && !std::get<Address>(*c).is_null();
    } else if (std::holds_alternative<IsNull>(t)) {
      auto c = constant_of(inv.vars);
      drop = c && std::get<Address>(*c).is_null();
    } else if (std::holds_alternative<ElementsInRange>(t)) {
      drop = has(inv.vars, is(AllElementsEqual{}));
    }
    if (!drop) kept.push_back(inv);
  }
  return kept;
}

InvariantSet InferInvariants(const Trace& trace, const InferenceConfig& config) {
  InvariantSet set;
  set.trace_name = trace.program;
  set.config = config;
  std::map<std::string, PointInference> points;
  for (const TraceSample& sample : trace.samples) {
    auto it = points.find(sample.point.Identity());
    if (it == points.end()) {
      it = points.emplace(sample.point.Identity(),
                          PointInference(sample.point, set.config))
               .first;
    }
    it->second.Add(sample);
  }
  for (auto& [identity, inference] : points) {
    set.points.push_back(inference.Finish());
  }
  return set;
}

InvariantFormatError::InvariantFormatError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      line_(line) {}

std::optional<InvariantInstance> ParseInvariant(const ProgramPoint& point,
                                                const std::string& text) {
  static const std::string kName = R"(([A-Za-z_][A-Za-z0-9_]*))";
  static const std::string kInt = R"((-?[0-9]+))";
  static const std::string kRat = R"((-?[0-9]+(?:/[0-9]+)?))";
  static const std::regex kUnaryPtr(kName + R"( (!=|is) null)");
  static const std::regex kCompare(kName + " (==|>=|<=|<) (.+)");
  static const std::regex kLinear(kName + " == " + kRat + R"(\*)" + kName +
                                  R"((?: ([+-]) ([0-9]+(?:/[0-9]+)?))?)");
  static const std::regex kOneOf(kName + R"( in \{([-0-9, ]*)\})");
  static const std::regex kArray(kName + " (sorted asc|sorted desc|elements equal)");
  static const std::regex kRange(kName + R"( elements in \[)" + kInt + ", " +
                                 kInt + R"(\])");
  static const std::regex kIdent(kName);

  InvariantInstance inv{point, {}, NonNull{}};
  inv.status = InvariantStatus::kJustified;
  std::smatch m;
  if (std::regex_match(text, m, kLinear)) {
    auto a = Rational::Parse(m[2]);
    std::optional<Rational> b = Rational(0);
    if (m[4].matched) {
      b = Rational::Parse((m[4] == "-" ? "-" : "") + std::string(m[5]));
    }
    if (!a || !b || a->is_zero()) return std::nullopt;
    inv.vars = {m[3], m[1]};
    inv.tmpl = LinearBinary{*a, *b};
    return inv;
  }
  if (std::regex_match(text, m, kUnaryPtr)) {
    inv.vars = {m[1]};
    if (m[2] == "is") inv.tmpl = IsNull{};
    return inv;
  }
  if (std::regex_match(text, m, kOneOf)) {
    inv.vars = {m[1]};
    OneOfSet set;
    std::istringstream values(m[2]);
    for (std::string item; std::getline(values, item, ',');) {
      item.erase(0, item.find_first_not_of(' '));
      auto v = ParseInt(item);
      if (!v) return std::nullopt;
      set.values.push_back(*v);
    }
    if (set.values.empty() ||
        !std::is_sorted(set.values.begin(), set.values.end()) ||
        std::adjacent_find(set.values.begin(), set.values.end()) !=
            set.values.end()) {
      return std::nullopt;
    }
    inv.tmpl = std::move(set);
    return inv;
  }
  if (std::regex_match(text, m, kArray)) {
    inv.vars = {m[1]};
    if (m[2] == "sorted asc") {
      inv.tmpl = SortedAsc{};
    } else if (m[2] == "sorted desc") {
      inv.tmpl = SortedDesc{};
    } else {
      inv.tmpl = AllElementsEqual{};
    }
    return inv;
  }
  if (std::regex_match(text, m, kRange)) {
    auto lo = ParseInt(std::string(m[2]));
    auto hi = ParseInt(std::string(m[3]));
    if (!lo || !hi || *lo > *hi) return std::nullopt;
    inv.vars = {m[1]};
    inv.tmpl = ElementsInRange{*lo, *hi};
    return inv;
  }
  if (std::regex_match(text, m, kCompare)) {
    const std::string op = m[2];
    const std::string rhs = m[3];
    inv.vars = {m[1]};
    if (auto v = ParseInt(rhs)) {
      if (op == "==") {
        inv.tmpl = Constant{Scalar(*v)};
      } else if (op == ">=") {
        inv.tmpl = LowerBound{*v};
      } else if (op == "<=") {
        inv.tmpl = UpperBound{*v};
      } else {
        return std::nullopt;
      }
      return inv;
    }
    if (op == "==" && rhs == "null") {
      inv.tmpl = Constant{Scalar(Address{})};
      return inv;
    }
    if (op == "==" && rhs.rfind("block", 0) == 0) {
      auto addr = Address::Parse(rhs);
      if (!addr) return std::nullopt;
      inv.tmpl = Constant{Scalar(*addr)};
      return inv;
    }
    if (std::regex_match(rhs, kIdent) && rhs != "null") {
      inv.vars.push_back(rhs);
      if (op == "==") {
        inv.tmpl = EqualVars{};
      } else if (op == "<") {
        inv.tmpl = LessThan{};
      } else if (op == "<=") {
        inv.tmpl = LessEq{};
      } else {
        return std::nullopt;
      }
      return inv;
    }
  }
  return std::nullopt;
}

std::string FormatInvariantSet(const InvariantSet& set) {
  std::ostringstream out;
  out << "miniinv 1\n";
  out << "trace " << set.trace_name << "\n";
  out << "config minSamples=" << set.config.min_samples << "\n";
  for (const PointInvariants& point : set.points) {
    out << "\nppt " << point.point.Identity() << "\n";
    for (const InvariantInstance& inv : point.invariants) {
      out << "inv " << inv.Render() << "\n";
    }
  }
  return out.str();
}

size_t WriteInvariantSet(const InvariantSet& set, std::ostream& sink) {
  const std::string text = FormatInvariantSet(set);
  const auto old_mask = sink.exceptions();
  sink.exceptions(std::ios::badbit | std::ios::failbit);
  sink.write(text.data(), static_cast<std::streamsize>(text.size()));
  sink.flush();
  sink.exceptions(old_mask);
  return text.size();
}

InvariantSet ReadInvariantSet(std::istream& source) {
  InvariantSet set;
  int line_no = 0;
  std::string line;
  auto next = [&]() {
    ++line_no;
    if (!std::getline(source, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  auto fail = [&](const std::string& message) {
    throw InvariantFormatError(line_no, message);
  };
  if (!next() || line != "miniinv 1") fail("malformed header: expected 'miniinv 1'");
  if (!next() || (line != "trace" && line.rfind("trace ", 0) != 0)) {
    fail("malformed header: expected 'trace <name>'");
  }
  set.trace_name = line.size() > 6 ? line.substr(6) : "";
  if (!next() || line.rfind("config minSamples=", 0) != 0) {
    fail("malformed header: expected 'config minSamples=<n>'");
  }
  auto min_samples = ParseInt(std::string_view(line).substr(18));
  if (!min_samples || *min_samples < 2 || *min_samples > INT32_MAX) {
    fail("invalid minSamples in '" + line + "'");
  }
  set.config.min_samples = static_cast<int>(*min_samples);
  std::string previous;
  while (next()) {
    if (line.empty()) continue;
    if (line.rfind("ppt ", 0) == 0) {
      auto point = ProgramPoint::Parse(line.substr(4));
      if (!point) fail("malformed program point '" + line.substr(4) + "'");
      if (!set.points.empty() && point->Identity() <= previous) {
        fail("program point " + point->Identity() + " out of canonical order");
      }
      previous = point->Identity();
      set.points.push_back(PointInvariants{*point, {}});
    } else if (line.rfind("inv ", 0) == 0) {
      if (set.points.empty()) fail("invariant before any 'ppt' line");
      PointInvariants& current = set.points.back();
      auto inv = ParseInvariant(current.point, line.substr(4));
      if (!inv) fail("malformed invariant '" + line.substr(4) + "'");
      current.invariants.push_back(std::move(*inv));
    } else {
      fail("expected 'ppt' or 'inv' but found '" + line + "'");
    }
  }
  return set;
}

InvariantSet ParseInvariantSet(const std::string& text) {
  std::istringstream in(text);
  return ReadInvariantSet(in);
}

}  // namespace membug
