#pragma once

// Test-only oracle: explicit simulation over a finite tangent set. Every
// support line is treated as one fixed-charge facility; its tight time is
// solved exactly by walking contributor activation times. Kept independent of
// the first-tight-tangent engine it checks.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "concavepd/concave.hpp"
#include "concavepd/tangent_engine.hpp"

namespace testsupport {

template <class Num>
std::vector<std::pair<Num, Num>> explicit_lines(const concavepd::ConcaveFunction<Num>& fn) {
  using CF = concavepd::ConcaveFunction<Num>;
  switch (fn.kind()) {
    case CF::Kind::FixedCharge:
      return {{fn.fixed_part(), concavepd::num_traits<Num>::zero()}};
    case CF::Kind::AffineFixed:
      return {{fn.fixed_part(), fn.unit_part()}};
    case CF::Kind::PiecewiseLinearMin:
      return fn.pieces();
    default:
      throw std::invalid_argument("explicit simulation needs a finite tangent set");
  }
}

// First time >= 0 at which the line (f, s) is tight under the profile, with
// the arrival convention for f = 0: the moment a contributor exists.
template <class Num>
std::optional<Num> line_tight_time(const std::pair<Num, Num>& line,
                                   const concavepd::RateProfile<Num>& profile) {
  Num zero = concavepd::num_traits<Num>::zero();
  const Num& f = line.first;
  const Num& s = line.second;
  struct Arrival {
    Num at;
    Num rate;
  };
  std::vector<Arrival> arrivals;
  Num base = zero, slope = zero;
  bool present = false;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    Num threshold = s * profile.demands[i];
    if (profile.budgets[i] >= threshold) {
      present = true;
      base += profile.budgets[i] - threshold;
      slope += profile.rates[i];
    } else if (profile.rates[i] > zero) {
      arrivals.push_back({(threshold - profile.budgets[i]) / profile.rates[i], profile.rates[i]});
    }
  }
  std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) { return a.at < b.at; });
  Num t = zero, acc = base;
  std::size_t next = 0;
  if (present && acc >= f) return t;
  while (true) {
    bool has_next = next < arrivals.size();
    Num t_next{};
    if (has_next) t_next = arrivals[next].at;
    if (present && slope > zero) {
      Num hit = t + (f - acc) / slope;
      if (!has_next || hit <= t_next) return hit;
    }
    if (!has_next) return std::nullopt;
    acc += slope * (t_next - t);
    t = t_next;
    while (next < arrivals.size() && arrivals[next].at == t) {
      slope += arrivals[next].rate;
      ++next;
    }
    present = true;
    if (acc >= f) return t;
  }
}

template <class Num>
struct SimulationResult {
  Num time;
  std::vector<std::pair<Num, Num>> tight_lines;  // distinct lines tight first
};

template <class Num>
std::optional<SimulationResult<Num>> simulate_first_tight(const concavepd::ConcaveFunction<Num>& fn,
                                                          const concavepd::RateProfile<Num>& profile) {
  auto lines = explicit_lines(fn);
  std::optional<Num> best;
  for (const auto& line : lines) {
    auto t = line_tight_time(line, profile);
    if (t && (!best || *t < *best)) best = t;
  }
  if (!best) return std::nullopt;
  SimulationResult<Num> res;
  res.time = *best;
  for (const auto& line : lines) {
    auto t = line_tight_time(line, profile);
    if (t && *t == *best) res.tight_lines.push_back(line);
  }
  return res;
}

// Contribution received by a line at a given time, straight from the
// definition.
template <class Num>
Num line_contribution(const std::pair<Num, Num>& line, const concavepd::RateProfile<Num>& profile,
                      const Num& t) {
  return concavepd::contribution_at(profile, line.second, t);
}

}  // namespace testsupport
