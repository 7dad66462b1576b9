#pragma once

#include <random>
#include <string>
#include <vector>

#include "concavepd/facility.hpp"
#include "concavepd/jrp.hpp"
#include "concavepd/lot_sizing.hpp"

namespace concavepd {

// Weak-duality certificate: primal feasibility, dual feasibility over the
// relevant candidate set, and the per-algorithm ratio bound.
template <class Num>
struct Certificate {
  std::string kind;
  Num primal{};
  Num dual{};
  Num bound{};
  bool pass = true;
  unsigned sample_seed = 0;
  std::vector<std::string> violations;

  void fail(std::string what) {
    pass = false;
    violations.push_back(std::move(what));
  }
};

namespace certdetail {

template <class Num>
Num fl_bound() {
  return num_traits<Num>::from_int(161) / num_traits<Num>::from_int(100);
}

// Candidate support lines of a cost: complete for the piecewise families (the
// pieces imply every other tangent by convexity), sampled for Power.
template <class Num>
std::vector<Tangent<Num>> candidate_lines(const ConcaveFunction<Num>& fn, std::mt19937_64& rng) {
  std::vector<Tangent<Num>> lines;
  switch (fn.kind()) {
    case ConcaveFunction<Num>::Kind::FixedCharge:
      lines.push_back({fn.fixed_part(), num_traits<Num>::zero(), num_traits<Num>::zero()});
      break;
    case ConcaveFunction<Num>::Kind::AffineFixed:
      lines.push_back({fn.fixed_part(), fn.unit_part(), num_traits<Num>::zero()});
      break;
    case ConcaveFunction<Num>::Kind::PiecewiseLinearMin:
      for (const auto& [f, s] : fn.pieces()) lines.push_back({f, s, num_traits<Num>::zero()});
      break;
    case ConcaveFunction<Num>::Kind::Power:
      if constexpr (std::is_same_v<Num, double>) {
        for (int i = 0; i < 24; ++i) {
          double p = std::ldexp(1.0 + static_cast<double>(rng() % 1024) / 1024.0,
                                static_cast<int>(rng() % 20) - 8);
          lines.push_back(fn.tangent_at(p));
        }
      }
      break;
  }
  return lines;
}

}  // namespace certdetail

template <class Num>
Certificate<Num> check_certificate(const FacilityInstance<Num>& inst, const FacilitySolution<Num>& sol,
                                   unsigned sample_seed = 20240801) {
  Certificate<Num> cert;
  cert.kind = "facility_location";
  cert.bound = certdetail::fl_bound<Num>();
  cert.sample_seed = sample_seed;
  cert.primal = sol.primal_cost;
  cert.dual = sol.dual_value;
  std::mt19937_64 rng(sample_seed);
  const int m = inst.customers(), n = inst.facilities();
  Num zero = num_traits<Num>::zero();

  if (static_cast<int>(sol.assigned.size()) != m) {
    cert.fail("assignment size mismatch");
    return cert;
  }
  std::vector<Num> load(n, zero);
  Num recomputed = zero;
  for (int i = 0; i < m; ++i) {
    int j = sol.assigned[i].facility;
    if (j < 0 || j >= n) {
      cert.fail("customer " + std::to_string(i) + " unassigned");
      return cert;
    }
    load[j] += inst.demand[i];
    recomputed += inst.connect[i][j] * inst.demand[i];
  }
  for (int j = 0; j < n; ++j) recomputed += inst.cost[j].eval(load[j]);
  if (!num_traits<Num>::eq(recomputed, sol.primal_cost)) cert.fail("primal cost mismatch");

  Num dual_sum = zero;
  for (const auto& v : sol.duals) {
    if (v < zero) cert.fail("negative dual");
    dual_sum += v;
  }
  if (!num_traits<Num>::eq(dual_sum, sol.dual_value)) cert.fail("dual value mismatch");

  // Dual feasibility: for every facility and candidate support line,
  // contributions must not exceed the line's fixed part.
  for (int j = 0; j < n; ++j) {
    auto lines = certdetail::candidate_lines(inst.cost[j], rng);
    for (const auto& line : lines) {
      Num total = zero;
      for (int i = 0; i < m; ++i) {
        Num excess = sol.duals[i] - (inst.connect[i][j] + line.s) * inst.demand[i];
        if (excess > zero) total += excess;
      }
      if (!num_traits<Num>::le(total, line.f))
        cert.fail("dual constraint violated at facility " + std::to_string(j));
    }
  }

  if (!num_traits<Num>::le(sol.dual_value, sol.primal_cost)) cert.fail("weak duality violated");
  if (!num_traits<Num>::le(sol.primal_cost, cert.bound * sol.dual_value)) cert.fail("ratio bound violated");
  return cert;
}

template <class Num>
Certificate<Num> check_certificate(const LotSizingInstance<Num>& inst, const LotSizingSolution<Num>& sol,
                                   unsigned sample_seed = 20240801) {
  Certificate<Num> cert;
  cert.kind = "lot_sizing";
  cert.bound = num_traits<Num>::one();
  cert.sample_seed = sample_seed;
  cert.primal = sol.primal_cost;
  cert.dual = sol.dual_value;
  std::mt19937_64 rng(sample_seed);
  const int n = inst.periods();
  const auto H = inst.holding_prefix();
  Num zero = num_traits<Num>::zero();

  std::vector<bool> open(n, false);
  for (const auto& o : sol.orders) open[o.period] = true;
  std::vector<Num> load(n, zero);
  Num recomputed = zero;
  for (int t = 0; t < n; ++t) {
    if (!(inst.demand[t] > zero)) continue;
    int s = t < static_cast<int>(sol.serve.size()) ? sol.serve[t] : -1;
    if (s < 0 || s > t || !open[s]) {
      cert.fail("demand period " + std::to_string(t) + " not feasibly served");
      return cert;
    }
    load[s] += inst.demand[t];
    recomputed += (H[t] - H[s]) * inst.demand[t];
  }
  for (int s = 0; s < n; ++s)
    if (open[s]) recomputed += inst.cost[s].eval(load[s]);
  if (!num_traits<Num>::eq(recomputed, sol.primal_cost)) cert.fail("primal cost mismatch");

  Num dual_sum = zero;
  for (const auto& v : sol.duals) {
    if (v < zero) cert.fail("negative dual");
    dual_sum += v;
  }
  if (!num_traits<Num>::eq(dual_sum, sol.dual_value)) cert.fail("dual value mismatch");

  for (int s = 0; s < n; ++s) {
    auto lines = certdetail::candidate_lines(inst.cost[s], rng);
    for (const auto& line : lines) {
      Num total = zero;
      for (int t = s; t < n; ++t) {
        Num excess = sol.duals[t] - (line.s + H[t] - H[s]) * inst.demand[t];
        if (excess > zero) total += excess;
      }
      if (!num_traits<Num>::le(total, line.f))
        cert.fail("dual constraint violated at order period " + std::to_string(s));
    }
  }

  if (!num_traits<Num>::le(sol.dual_value, sol.primal_cost)) cert.fail("weak duality violated");
  if (!num_traits<Num>::le(sol.primal_cost, sol.dual_value)) cert.fail("exactness violated");
  return cert;
}

template <class Num>
Certificate<Num> check_certificate(const JrpInstance<Num>& inst, const JrpSolution<Num>& sol,
                                   unsigned sample_seed = 20240801) {
  Certificate<Num> cert;
  cert.kind = "jrp";
  cert.bound = num_traits<Num>::from_int(4);
  cert.sample_seed = sample_seed;
  cert.primal = sol.primal_cost;
  cert.dual = sol.dual_value;
  const int n = inst.periods(), K = inst.items();
  Num zero = num_traits<Num>::zero();

  std::vector<bool> joint(n, false);
  for (int s : sol.joint_open) joint[s] = true;

  // Primal feasibility and cost.
  Num recomputed = inst.joint_fixed * num_traits<Num>::from_int(static_cast<long long>(sol.joint_open.size()));
  std::vector<std::vector<Num>> load(K, std::vector<Num>(n, zero));
  for (int k = 0; k < K; ++k) {
    const auto H = inst.holding_prefix(k);
    for (int t = 0; t < n; ++t) {
      if (!(inst.demand[k][t] > zero)) continue;
      int s = sol.serve[k][t];
      if (s < 0 || s > t || !joint[s]) {
        cert.fail("demand point not feasibly served");
        return cert;
      }
      load[k][s] += inst.demand[k][t];
      recomputed += (H[t] - H[s]) * inst.demand[k][t];
    }
    for (int s = 0; s < n; ++s)
      if (load[k][s] > zero) recomputed += inst.item_cost[k].eval(load[k][s]);
  }
  if (!num_traits<Num>::eq(recomputed, sol.primal_cost)) cert.fail("primal cost mismatch");

  Num dual_sum = zero;
  for (const auto& row : sol.duals)
    for (const auto& v : row) {
      if (v < zero) cert.fail("negative dual");
      dual_sum += v;
    }
  if (!num_traits<Num>::eq(dual_sum, sol.dual_value)) cert.fail("dual value mismatch");

  // Reconstructed contribution vectors for every traced tight item order:
  // the budget at the tight event is min(final budget, wave formula there).
  auto frozen_w = [&](const typename JrpSolution<Num>::TightItemOrder& rec, int t) {
    const auto H = inst.holding_prefix(rec.item);
    Num formula = inst.demand[rec.item][t] *
                  (H[t] - item_wave(rec.wave, H, inst.holding[rec.item]));
    if (formula < zero) formula = zero;
    Num v = sol.duals[rec.item][t];
    Num at_event = v < formula ? v : formula;
    Num excess = at_event - (rec.line.s + H[t] - H[rec.period]) * inst.demand[rec.item][t];
    return excess > zero ? excess : zero;
  };

  // (i) individual-order constraints at the traced tangents.
  for (const auto& rec : sol.tight_items) {
    const auto H = inst.holding_prefix(rec.item);
    Num total = zero;
    for (int t = rec.period; t < n; ++t) total += frozen_w(rec, t);
    if (!num_traits<Num>::le(total, rec.line.f))
      cert.fail("item order contribution exceeds its fixed cost");
  }
  // (ii) joint constraints for the traced tuple at every period.
  for (int s = 0; s < n; ++s) {
    Num total = zero;
    for (const auto& rec : sol.tight_items) {
      if (rec.period != s) continue;
      const auto H = inst.holding_prefix(rec.item);
      for (int t = s; t < n; ++t) {
        Num thr = (rec.line.s + H[t] - H[s]) * inst.demand[rec.item][t] + frozen_w(rec, t);
        Num excess = sol.duals[rec.item][t] - thr;
        if (excess > zero) total += excess;
      }
    }
    if (!num_traits<Num>::le(total, inst.joint_fixed))
      cert.fail("joint contribution exceeds the joint fixed cost at period " + std::to_string(s));
  }
  // (iii) untight candidate lines must never have been over-tight: with final
  // budgets their contributions stay below the fixed part.
  {
    std::mt19937_64 rng(sample_seed);
    for (int k = 0; k < K; ++k) {
      const auto H = inst.holding_prefix(k);
      auto lines = certdetail::candidate_lines(inst.item_cost[k], rng);
      for (int s = 0; s < n; ++s) {
        bool tracked = false;
        for (const auto& rec : sol.tight_items)
          if (rec.period == s && rec.item == k) tracked = true;
        if (tracked) continue;
        for (const auto& line : lines) {
          Num total = zero;
          for (int t = s; t < n; ++t) {
            Num excess = sol.duals[k][t] - (line.s + H[t] - H[s]) * inst.demand[k][t];
            if (excess > zero) total += excess;
          }
          if (!num_traits<Num>::le(total, line.f))
            cert.fail("untight item order went over-tight unnoticed");
        }
      }
    }
  }

  if (!num_traits<Num>::le(sol.dual_value, sol.primal_cost)) cert.fail("weak duality violated");
  if (!num_traits<Num>::le(sol.primal_cost, cert.bound * sol.dual_value)) cert.fail("ratio bound violated");
  return cert;
}

}  // namespace concavepd
