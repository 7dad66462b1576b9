#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "concavepd/concave.hpp"

namespace concavepd {

// Budget-growth scenario for a single concave cost with zero connection
// costs: customer i starts with budget v_i >= 0 growing at rate delta_i >= 0,
// and contributes max{0, v_i + t*delta_i - s*d_i} to the tangent of slope s.
template <class Num>
struct RateProfile {
  std::vector<Num> demands;  // d_i > 0
  std::vector<Num> budgets;  // v_i >= 0
  std::vector<Num> rates;    // delta_i >= 0

  std::size_t size() const { return demands.size(); }

  void validate() const {
    if (budgets.size() != demands.size() || rates.size() != demands.size())
      throw std::invalid_argument("rate profile arrays must have equal length");
    for (std::size_t i = 0; i < demands.size(); ++i) {
      if (!(demands[i] > num_traits<Num>::zero())) throw std::invalid_argument("demands must be positive");
      if (budgets[i] < num_traits<Num>::zero()) throw std::invalid_argument("budgets must be >= 0");
      if (rates[i] < num_traits<Num>::zero()) throw std::invalid_argument("rates must be >= 0");
    }
  }
};

// First tangent to become tight: touch point (a subset demand total) and the
// time it happens. The time is negative when the profile is already over-tight
// at t = 0; callers that feed feasible states never see that.
template <class Num>
struct TightTangentResult {
  Num p_star;
  Num t_star;
};

// Zero-budget re-timed scenario whose tight times map back affinely
// (t = (tau - beta)/alpha) to the original run.
template <class Num>
struct AlternateSetting {
  std::vector<int> customers;  // contributing index set, ascending
  Num alpha;                   // growing demand share, in (0,1]
  Num beta;                    // budget head start, >= 0
  Num p_prime;                 // subset demand total = tight touch point
  Num tau_prime;               // tight time in the alternate setting
  Num t_prime;                 // mapped-back tight time
};

// Contribution received by the support line of slope `s` at time t.
template <class Num>
Num contribution_at(const RateProfile<Num>& profile, const Num& slope, const Num& t) {
  Num total = num_traits<Num>::zero();
  for (std::size_t i = 0; i < profile.size(); ++i) {
    Num excess = profile.budgets[i] + t * profile.rates[i] - slope * profile.demands[i];
    if (excess > num_traits<Num>::zero()) total += excess;
  }
  return total;
}

// All customers start at zero budget and grow at their demand rate: the
// tangent at the total demand becomes tight first, at slope + fixed/total.
template <class Num>
TightTangentResult<Num> first_tight_zero_budgets(const ConcaveFunction<Num>& fn,
                                                 const std::vector<Num>& demands) {
  if (demands.empty()) throw std::invalid_argument("need at least one growing customer");
  Num total = num_traits<Num>::zero();
  for (const Num& d : demands) {
    if (!(d > num_traits<Num>::zero())) throw std::invalid_argument("demands must be positive");
    total += d;
  }
  Tangent<Num> tan = fn.tangent_at(total);
  return {total, tan.s + tan.f / total};
}

namespace detail {

template <class Num>
struct ClassEntry {
  Num per_unit;  // v_i / d_i
  Num demand;
  int index;
};

template <class Num>
std::vector<ClassEntry<Num>> sorted_class(const std::vector<Num>& demands,
                                          const std::vector<Num>& budgets,
                                          const std::vector<int>& members) {
  std::vector<ClassEntry<Num>> out;
  out.reserve(members.size());
  for (int i : members) out.push_back({budgets[i] / demands[i], demands[i], i});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.per_unit != b.per_unit) return b.per_unit < a.per_unit;
    return a.index < b.index;
  });
  return out;
}

}  // namespace detail

// The alternate-setting grid for profiles whose rates are 0 or d_i:
// k runs over prefixes of the growing customers (sorted by v/d descending),
// l over prefixes of the stopped ones.
template <class Num>
std::vector<AlternateSetting<Num>> mixed_alternate_settings(const ConcaveFunction<Num>& fn,
                                                            const RateProfile<Num>& profile) {
  profile.validate();
  std::vector<int> growing, stopped;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile.rates[i] > num_traits<Num>::zero()) {
      if (!num_traits<Num>::eq(profile.rates[i], profile.demands[i]))
        throw std::invalid_argument("mixed profile rates must be 0 or d_i");
      growing.push_back(static_cast<int>(i));
    } else {
      stopped.push_back(static_cast<int>(i));
    }
  }
  std::vector<AlternateSetting<Num>> settings;
  if (growing.empty()) return settings;

  auto u = detail::sorted_class(profile.demands, profile.budgets, growing);
  auto c = detail::sorted_class(profile.demands, profile.budgets, stopped);

  Num du = num_traits<Num>::zero(), vu = num_traits<Num>::zero();
  for (std::size_t k = 1; k <= u.size(); ++k) {
    du += u[k - 1].demand;
    vu += u[k - 1].per_unit * u[k - 1].demand;
    Num dc = num_traits<Num>::zero(), vc = num_traits<Num>::zero();
    for (std::size_t l = 0; l <= c.size(); ++l) {
      if (l > 0) {
        dc += c[l - 1].demand;
        vc += c[l - 1].per_unit * c[l - 1].demand;
      }
      AlternateSetting<Num> s;
      s.customers.reserve(k + l);
      for (std::size_t i = 0; i < k; ++i) s.customers.push_back(u[i].index);
      for (std::size_t i = 0; i < l; ++i) s.customers.push_back(c[i].index);
      std::sort(s.customers.begin(), s.customers.end());
      s.p_prime = du + dc;
      s.alpha = du / s.p_prime;
      s.beta = (vu + vc) / s.p_prime;
      Tangent<Num> tan = fn.tangent_at(s.p_prime);
      s.tau_prime = tan.s + tan.f / s.p_prime;
      s.t_prime = (s.tau_prime - s.beta) / s.alpha;
      settings.push_back(std::move(s));
    }
  }
  return settings;
}

// Line-aware variant of the mixed computation: for every candidate touch
// point the caller inspects the (up to two) support lines there and either
// returns the one to schedule or rejects the setting. Used by the implicit
// solvers to keep already-open lines from shadowing co-tight closed ones.
template <class Num, class LinePick>
std::optional<std::pair<TightTangentResult<Num>, Tangent<Num>>> first_tight_mixed_lines(
    const ConcaveFunction<Num>& fn, const RateProfile<Num>& profile, LinePick&& pick) {
  profile.validate();
  std::vector<int> growing, stopped;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile.rates[i] > num_traits<Num>::zero()) {
      if (!num_traits<Num>::eq(profile.rates[i], profile.demands[i]))
        throw std::invalid_argument("mixed profile rates must be 0 or d_i");
      growing.push_back(static_cast<int>(i));
    } else {
      stopped.push_back(static_cast<int>(i));
    }
  }
  if (growing.empty()) return std::nullopt;
  auto u = detail::sorted_class(profile.demands, profile.budgets, growing);
  auto c = detail::sorted_class(profile.demands, profile.budgets, stopped);

  bool have = false;
  Num best_t{}, best_p{};
  Tangent<Num> best_line{};
  Num du = num_traits<Num>::zero(), vu = num_traits<Num>::zero();
  for (std::size_t k = 1; k <= u.size(); ++k) {
    du += u[k - 1].demand;
    vu += u[k - 1].per_unit * u[k - 1].demand;
    Num dc = num_traits<Num>::zero(), vc = num_traits<Num>::zero();
    for (std::size_t l = 0; l <= c.size(); ++l) {
      if (l > 0) {
        dc += c[l - 1].demand;
        vc += c[l - 1].per_unit * c[l - 1].demand;
      }
      Num p = du + dc;
      Tangent<Num> steep = fn.tangent_at_steep(p);
      Tangent<Num> flat = fn.tangent_at(p);
      auto line = pick(steep, flat);
      if (!line) continue;
      // Both kink lines share s + f/p, so the time is line-independent.
      Num t = (line->s * p + line->f - (vu + vc)) / du;
      if (!have || t < best_t || (num_traits<Num>::eq(t, best_t) && p < best_p)) {
        have = true;
        best_t = t;
        best_p = p;
        best_line = *line;
      }
    }
  }
  if (!have) return std::nullopt;
  best_line.p = best_p;
  return std::make_pair(TightTangentResult<Num>{best_p, best_t}, best_line);
}

// First tangent to become tight when rates are 0 or d_i: the minimum mapped
// time over the alternate-setting grid. Returns nullopt when nothing grows. Same grid as
// mixed_alternate_settings, without materializing the customer sets.
template <class Num>
std::optional<TightTangentResult<Num>> first_tight_mixed(const ConcaveFunction<Num>& fn,
                                                         const RateProfile<Num>& profile) {
  profile.validate();
  std::vector<int> growing, stopped;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile.rates[i] > num_traits<Num>::zero()) {
      if (!num_traits<Num>::eq(profile.rates[i], profile.demands[i]))
        throw std::invalid_argument("mixed profile rates must be 0 or d_i");
      growing.push_back(static_cast<int>(i));
    } else {
      stopped.push_back(static_cast<int>(i));
    }
  }
  if (growing.empty()) return std::nullopt;
  auto u = detail::sorted_class(profile.demands, profile.budgets, growing);
  auto c = detail::sorted_class(profile.demands, profile.budgets, stopped);

  bool have = false;
  Num best_t{}, best_p{};
  Num du = num_traits<Num>::zero(), vu = num_traits<Num>::zero();
  for (std::size_t k = 1; k <= u.size(); ++k) {
    du += u[k - 1].demand;
    vu += u[k - 1].per_unit * u[k - 1].demand;
    Num dc = num_traits<Num>::zero(), vc = num_traits<Num>::zero();
    for (std::size_t l = 0; l <= c.size(); ++l) {
      if (l > 0) {
        dc += c[l - 1].demand;
        vc += c[l - 1].per_unit * c[l - 1].demand;
      }
      Num p = du + dc;
      Tangent<Num> tan = fn.tangent_at(p);
      // t' = (tau' - beta)/alpha with tau' = s + f/p, alpha = du/p, beta = V/p.
      Num t = (tan.s * p + tan.f - (vu + vc)) / du;
      // Ties prefer the smallest touch point (the steepest tangent).
      if (!have || t < best_t || (num_traits<Num>::eq(t, best_t) && p < best_p)) {
        have = true;
        best_t = t;
        best_p = p;
      }
    }
  }
  return TightTangentResult<Num>{best_p, best_t};
}

// Crossing schedule of the per-unit budget lines (v_i + t*delta_i)/d_i.
template <class Num>
struct BreakpointSchedule {
  std::vector<Num> thetas;                       // strictly increasing, in (0, inf)
  std::vector<std::vector<int>> permutations;    // order at t=0 and just after each theta
  std::vector<std::vector<int>> prefix_family;   // candidate contributor sets, deduped
};

template <class Num>
BreakpointSchedule<Num> compute_breakpoints(const RateProfile<Num>& profile) {
  profile.validate();
  const std::size_t m = profile.size();
  auto per_unit_budget = [&](std::size_t i) { return profile.budgets[i] / profile.demands[i]; };
  auto per_unit_rate = [&](std::size_t i) { return profile.rates[i] / profile.demands[i]; };

  BreakpointSchedule<Num> sched;
  std::vector<Num> thetas;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      Num dr = per_unit_rate(i) - per_unit_rate(j);
      if (num_traits<Num>::eq(dr, num_traits<Num>::zero())) continue;  // parallel
      Num theta = (per_unit_budget(j) - per_unit_budget(i)) / dr;
      if (theta > num_traits<Num>::zero()) thetas.push_back(theta);
    }
  }
  std::sort(thetas.begin(), thetas.end());
  for (const Num& theta : thetas) {
    if (!sched.thetas.empty() && num_traits<Num>::eq(sched.thetas.back(), theta)) continue;
    sched.thetas.push_back(theta);
  }

  // Order as t -> inf: by rate ratio, then budget ratio, then index.
  std::vector<int> rank_inf(m);
  {
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (per_unit_rate(a) != per_unit_rate(b)) return per_unit_rate(b) < per_unit_rate(a);
      if (per_unit_budget(a) != per_unit_budget(b)) return per_unit_budget(b) < per_unit_budget(a);
      return a < b;
    });
    for (std::size_t r = 0; r < m; ++r) rank_inf[order[r]] = static_cast<int>(r);
  }

  auto order_at = [&](const Num& t) {
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      Num ga = per_unit_budget(a) + t * per_unit_rate(a);
      Num gb = per_unit_budget(b) + t * per_unit_rate(b);
      if (!num_traits<Num>::eq(ga, gb)) return gb < ga;
      return rank_inf[a] < rank_inf[b];
    });
    return order;
  };

  std::set<std::vector<int>> family;
  auto add_prefixes = [&](const std::vector<int>& perm) {
    std::vector<int> prefix;
    family.insert(prefix);
    for (int idx : perm) {
      prefix.push_back(idx);
      std::vector<int> sorted = prefix;
      std::sort(sorted.begin(), sorted.end());
      family.insert(std::move(sorted));
    }
  };

  sched.permutations.push_back(order_at(num_traits<Num>::zero()));
  add_prefixes(sched.permutations.back());
  for (const Num& theta : sched.thetas) {
    sched.permutations.push_back(order_at(theta));
    add_prefixes(sched.permutations.back());
  }
  sched.prefix_family.assign(family.begin(), family.end());
  return sched;
}

// Alternate settings over the breakpoint prefix family, for arbitrary
// nonnegative rates.
template <class Num>
std::vector<AlternateSetting<Num>> general_alternate_settings(const ConcaveFunction<Num>& fn,
                                                              const RateProfile<Num>& profile) {
  BreakpointSchedule<Num> sched = compute_breakpoints(profile);
  std::vector<AlternateSetting<Num>> settings;
  for (const auto& members : sched.prefix_family) {
    if (members.empty()) continue;
    Num d = num_traits<Num>::zero(), v = num_traits<Num>::zero(), rate = num_traits<Num>::zero();
    for (int i : members) {
      d += profile.demands[i];
      v += profile.budgets[i];
      rate += profile.rates[i];
    }
    if (!(rate > num_traits<Num>::zero())) continue;
    AlternateSetting<Num> s;
    s.customers = members;
    s.p_prime = d;
    s.alpha = rate / d;
    s.beta = v / d;
    Tangent<Num> tan = fn.tangent_at(s.p_prime);
    s.tau_prime = tan.s + tan.f / s.p_prime;
    s.t_prime = (s.tau_prime - s.beta) / s.alpha;
    settings.push_back(std::move(s));
  }
  return settings;
}

// First tangent to become tight under arbitrary nonnegative rates.
template <class Num>
std::optional<TightTangentResult<Num>> first_tight_general(const ConcaveFunction<Num>& fn,
                                                           const RateProfile<Num>& profile) {
  auto settings = general_alternate_settings(fn, profile);
  if (settings.empty()) return std::nullopt;
  const AlternateSetting<Num>* best = nullptr;
  for (const auto& s : settings) {
    // Ties prefer the smallest touch point, then the lexicographically
    // smallest customer set.
    bool better = !best || s.t_prime < best->t_prime;
    if (!better && num_traits<Num>::eq(s.t_prime, best->t_prime)) {
      if (s.p_prime < best->p_prime)
        better = true;
      else if (num_traits<Num>::eq(s.p_prime, best->p_prime) && s.customers < best->customers)
        better = true;
    }
    if (better) best = &s;
  }
  return TightTangentResult<Num>{best->p_prime, best->t_prime};
}

}  // namespace concavepd
