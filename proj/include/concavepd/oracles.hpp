#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "concavepd/facility.hpp"
#include "concavepd/jrp.hpp"
#include "concavepd/lot_sizing.hpp"

namespace concavepd {

template <class Num>
struct BruteForceAssignment {
  Num cost{};
  std::vector<int> assignment;
};

// Exact facility-location optimum by depth-first enumeration of whole-customer
// assignments (a vertex optimum assigns each customer to one facility), with
// partial-cost pruning. Refuses instances beyond `limit` assignments.
template <class Num>
BruteForceAssignment<Num> brute_force_flp(const FacilityInstance<Num>& inst,
                                          long long limit = 10'000'000) {
  inst.validate();
  const int m = inst.customers(), n = inst.facilities();
  double combos = 1;
  for (int i = 0; i < m; ++i) {
    combos *= n;
    if (combos > static_cast<double>(limit))
      throw std::invalid_argument("facility brute force beyond enumeration limit");
  }
  std::vector<Num> load(n, num_traits<Num>::zero());
  std::vector<int> current(m, -1), best_assign(m, -1);
  bool have_best = false;
  Num best_cost = num_traits<Num>::zero();

  auto facility_cost = [&]() {
    Num c = num_traits<Num>::zero();
    for (int j = 0; j < n; ++j) c += inst.cost[j].eval(load[j]);
    return c;
  };

  // conn = connection cost of customers assigned so far; facility cost is
  // re-evaluated on the current loads (a lower bound: loads only grow).
  auto rec = [&](auto&& self, int i, Num conn) -> void {
    Num partial = conn + facility_cost();
    if (have_best && !(partial < best_cost)) return;
    if (i == m) {
      best_cost = partial;
      best_assign = current;
      have_best = true;
      return;
    }
    for (int j = 0; j < n; ++j) {
      current[i] = j;
      load[j] += inst.demand[i];
      self(self, i + 1, conn + inst.connect[i][j] * inst.demand[i]);
      load[j] -= inst.demand[i];
      current[i] = -1;
    }
  };
  rec(rec, 0, num_traits<Num>::zero());
  return {best_cost, best_assign};
}

// Second, independently coded enumerator: mixed-radix counter, full
// re-evaluation per assignment, no pruning. Test-scale only.
template <class Num>
Num brute_force_flp_naive(const FacilityInstance<Num>& inst) {
  const int m = inst.customers(), n = inst.facilities();
  std::vector<int> digits(m, 0);
  bool have = false;
  Num best = num_traits<Num>::zero();
  while (true) {
    Num cost = num_traits<Num>::zero();
    std::vector<Num> load(n, num_traits<Num>::zero());
    for (int i = 0; i < m; ++i) {
      cost += inst.connect[i][digits[i]] * inst.demand[i];
      load[digits[i]] += inst.demand[i];
    }
    for (int j = 0; j < n; ++j) cost += inst.cost[j].eval(load[j]);
    if (!have || cost < best) {
      best = cost;
      have = true;
    }
    int pos = 0;
    while (pos < m && ++digits[pos] == n) digits[pos++] = 0;
    if (pos == m) break;
  }
  return best;
}

template <class Num>
struct LotSizingOptimum {
  Num cost{};
  std::vector<int> serve;  // order period per period (-1 when no demand)
};

// Exact lot-sizing optimum: dynamic program over regeneration intervals
// (each period's demand served wholly from one order; optimal for concave
// order costs).
template <class Num>
LotSizingOptimum<Num> dp_lot_sizing(const LotSizingInstance<Num>& inst) {
  inst.validate();
  const int n = inst.periods();
  const auto H = inst.holding_prefix();
  Num zero = num_traits<Num>::zero();
  std::vector<Num> best(n + 1, zero);
  std::vector<bool> defined(n + 1, false);
  std::vector<int> from(n + 1, -1);
  defined[0] = true;

  for (int s = 0; s < n; ++s) {
    if (!defined[s]) continue;
    // Zero-demand period may simply be skipped.
    if (!(inst.demand[s] > zero)) {
      if (!defined[s + 1] || best[s] < best[s + 1]) {
        best[s + 1] = best[s];
        defined[s + 1] = true;
        from[s + 1] = -1;  // skip marker
      }
    }
    Num block_demand = zero, block_holding = zero;
    for (int t = s; t < n; ++t) {
      block_demand += inst.demand[t];
      block_holding += (H[t] - H[s]) * inst.demand[t];
      Num cand = best[s] + inst.cost[s].eval(block_demand) + block_holding;
      if (!defined[t + 1] || cand < best[t + 1]) {
        best[t + 1] = cand;
        defined[t + 1] = true;
        from[t + 1] = s;
      }
    }
  }

  LotSizingOptimum<Num> out;
  out.cost = best[n];
  out.serve.assign(n, -1);
  // Recover the order schedule by walking the DP parents.
  int t = n;
  while (t > 0) {
    int s = from[t];
    if (s < 0) {
      --t;
      continue;
    }
    for (int u = s; u < t; ++u)
      if (inst.demand[u] > zero) out.serve[u] = s;
    t = s;
  }
  return out;
}

// Exhaustive lot-sizing oracle: every order-period subset induces the schedule
// where an order serves the demands up to the next chosen period; each
// schedule is costed from scratch.
template <class Num>
Num enumerate_lot_sizing_schedules(const LotSizingInstance<Num>& inst) {
  const int n = inst.periods();
  if (n > 22) throw std::invalid_argument("subset enumeration limited to 22 periods");
  const auto H = inst.holding_prefix();
  Num zero = num_traits<Num>::zero();
  bool have = false;
  Num best = zero;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Num cost = zero;
    int open = -1;
    Num block_demand = zero;
    bool feasible = true;
    std::vector<std::pair<int, Num>> blocks;
    for (int t = 0; t < n; ++t) {
      if (mask & (1u << t)) {
        if (open >= 0) blocks.push_back({open, block_demand});
        open = t;
        block_demand = zero;
      }
      if (inst.demand[t] > zero) {
        if (open < 0) {
          feasible = false;
          break;
        }
        block_demand += inst.demand[t];
        cost += (H[t] - H[open]) * inst.demand[t];
      }
    }
    if (!feasible) continue;
    if (open >= 0) blocks.push_back({open, block_demand});
    for (const auto& [s, d] : blocks) cost += inst.cost[s].eval(d);
    if (!have || cost < best) {
      best = cost;
      have = true;
    }
  }
  if (!have) return zero;  // no demand anywhere
  return best;
}

// Exact JRP optimum: enumerate the joint-order period set; per item, a
// restricted-order DP yields the best usage of those periods.
template <class Num>
Num brute_force_jrp(const JrpInstance<Num>& inst, long long limit = 10'000'000) {
  inst.validate();
  const int n = inst.periods(), K = inst.items();
  if ((1LL << n) * std::max(1, K) * n * n > limit)
    throw std::invalid_argument("jrp brute force beyond enumeration limit");
  Num zero = num_traits<Num>::zero();

  bool any_demand = false;
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < n; ++t)
      if (inst.demand[k][t] > zero) any_demand = true;
  if (!any_demand) return zero;

  bool have = false;
  Num best = zero;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Num cost = zero;
    int joint_orders = 0;
    for (int t = 0; t < n; ++t)
      if (mask & (1u << t)) ++joint_orders;
    cost += inst.joint_fixed * num_traits<Num>::from_int(joint_orders);
    bool feasible = true;
    for (int k = 0; k < K && feasible; ++k) {
      auto H = inst.holding_prefix(k);
      std::vector<Num> bestk(n + 1, zero);
      std::vector<bool> defined(n + 1, false);
      defined[0] = true;
      for (int s = 0; s < n; ++s) {
        if (!defined[s]) continue;
        if (!(inst.demand[k][s] > zero)) {
          if (!defined[s + 1] || bestk[s] < bestk[s + 1]) {
            bestk[s + 1] = bestk[s];
            defined[s + 1] = true;
          }
        }
        if (!(mask & (1u << s))) continue;
        Num block_demand = zero, block_holding = zero;
        for (int t = s; t < n; ++t) {
          block_demand += inst.demand[k][t];
          block_holding += (H[t] - H[s]) * inst.demand[k][t];
          Num cand = bestk[s] + inst.item_cost[k].eval(block_demand) + block_holding;
          if (!defined[t + 1] || cand < bestk[t + 1]) {
            bestk[t + 1] = cand;
            defined[t + 1] = true;
          }
        }
      }
      if (!defined[n])
        feasible = false;
      else
        cost += bestk[n];
    }
    if (!feasible) continue;
    if (!have || cost < best) {
      best = cost;
      have = true;
    }
  }
  return best;
}

}  // namespace concavepd
