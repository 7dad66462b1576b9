#include <doctest.h>

#include <random>

#include "concavepd/certify.hpp"
#include "concavepd/generator.hpp"
#include "concavepd/lot_sizing.hpp"
#include "concavepd/oracles.hpp"

using namespace concavepd;

namespace {

using R = Rational;

LotSizingInstance<R> make_classical(std::vector<R> d, std::vector<R> h, std::vector<std::pair<R, R>> fc) {
  LotSizingInstance<R> inst;
  inst.demand = std::move(d);
  inst.holding = std::move(h);
  for (auto& [f, c] : fc) inst.cost.push_back(ConcaveFunction<R>::affine_fixed(f, c));
  inst.validate();
  return inst;
}

}  // namespace

TEST_CASE("single period") {
  auto inst = make_classical({R(1)}, {}, {{R(5), R(0)}});
  auto sol = solve_classical_lspd(inst);
  CHECK(sol.primal_cost == R(5));
  CHECK(sol.dual_value == R(5));
  CHECK(sol.duals[0] == R(5));
  CHECK(sol.final_wave == R(-5));
  CHECK(sol.serve[0] == 0);
  auto dp = dp_lot_sizing(inst);
  CHECK(dp.cost == R(5));
  CHECK(check_certificate(inst, sol).pass);
}

TEST_CASE("two periods, cheap first order serves both") {
  auto inst = make_classical({R(1), R(1)}, {R(1)}, {{R(3), R(0)}, {R(100), R(0)}});
  auto sol = solve_classical_lspd(inst);
  CHECK(sol.primal_cost == R(4));
  CHECK(sol.dual_value == R(4));
  CHECK(sol.serve[0] == 0);
  CHECK(sol.serve[1] == 0);
  CHECK(sol.duals[0] == R(3, 2));
  CHECK(sol.duals[1] == R(5, 2));
  CHECK(dp_lot_sizing(inst).cost == R(4));
  CHECK(check_certificate(inst, sol).pass);
}

TEST_CASE("no demand, empty solution") {
  auto inst = make_classical({R(0), R(0)}, {R(2)}, {{R(3), R(1)}, {R(4), R(1)}});
  auto classical = solve_classical_lspd(inst);
  CHECK(classical.primal_cost == R(0));
  CHECK(classical.dual_value == R(0));
  CHECK(classical.orders.empty());
  auto concave = solve_concave_lspd(inst);
  CHECK(concave.primal_cost == R(0));
  CHECK(dp_lot_sizing(inst).cost == R(0));
}

TEST_CASE("holding prefix telescopes") {
  auto inst = make_classical({R(1), R(1), R(1), R(1)}, {R(2), R(0), R(3)},
                             {{R(1), R(0)}, {R(1), R(0)}, {R(1), R(0)}, {R(1), R(0)}});
  auto H = inst.holding_prefix();
  for (int s = 0; s < 4; ++s)
    for (int u = s; u < 4; ++u)
      for (int t = u; t < 4; ++t)
        CHECK((H[u] - H[s]) + (H[t] - H[u]) == H[t] - H[s]);
}

TEST_CASE("affine costs: concave solver equals the classical one") {
  std::mt19937_64 rng(20240526);
  for (int iter = 0; iter < 80; ++iter) {
    GeneratorSpec spec;
    spec.kind = "lot_sizing";
    spec.n = 1 + static_cast<int>(rng() % 8);
    spec.seed = rng();
    spec.cost_mix = "affine";
    auto inst = generate_lot_sizing<R>(spec);
    auto classical = solve_classical_lspd(inst);
    auto concave = solve_concave_lspd(inst);
    CHECK(classical.primal_cost == concave.primal_cost);
    CHECK(classical.dual_value == concave.dual_value);
    CHECK(classical.duals == concave.duals);
  }
}

TEST_CASE("piecewise costs: implicit run equals the explicit expansion run") {
  std::mt19937_64 rng(20240527);
  for (int iter = 0; iter < 120; ++iter) {
    GeneratorSpec spec;
    spec.kind = "lot_sizing";
    spec.n = 1 + static_cast<int>(rng() % 6);
    spec.seed = rng();
    spec.cost_mix = iter % 2 == 0 ? "pwl" : "mixed";
    auto inst = generate_lot_sizing<R>(spec);
    auto concave = solve_concave_lspd(inst);
    auto expanded = solve_lspd_on_expansion(inst);
    CHECK(concave.dual_value == expanded.dual_value);
    CHECK(concave.duals == expanded.duals);
    CHECK(concave.serve == expanded.serve);
    CHECK(concave.primal_cost == expanded.primal_cost);
    // Tight-event sequences match as (wave, period, line) tuples.
    std::vector<std::tuple<R, int, R, R>> ec, ee;
    for (const auto& ev : concave.trace)
      if (ev.kind == TraceKind::TangentTight) ec.push_back({ev.wave, ev.facility, ev.intercept, ev.slope});
    for (const auto& ev : expanded.trace)
      if (ev.kind == TraceKind::TangentTight) ee.push_back({ev.wave, ev.facility, ev.intercept, ev.slope});
    CHECK(ec == ee);
  }
}

TEST_CASE("exactness against the dynamic program") {
  std::mt19937_64 rng(20240528);
  for (int iter = 0; iter < 300; ++iter) {
    GeneratorSpec spec;
    spec.kind = "lot_sizing";
    spec.n = 1 + static_cast<int>(rng() % 12);
    spec.seed = rng();
    auto inst = generate_lot_sizing<R>(spec);
    auto sol = solve_concave_lspd(inst);
    auto dp = dp_lot_sizing(inst);
    CHECK(sol.primal_cost == dp.cost);
    CHECK(sol.primal_cost == sol.dual_value);
    auto cert = check_certificate(inst, sol);
    CHECK(cert.pass);
    if (!cert.pass)
      for (const auto& v : cert.violations) MESSAGE(v);
  }
}

TEST_CASE("wave bound and contribution invariants") {
  std::mt19937_64 rng(20240529);
  for (int iter = 0; iter < 60; ++iter) {
    GeneratorSpec spec;
    spec.kind = "lot_sizing";
    spec.n = 1 + static_cast<int>(rng() % 8);
    spec.seed = rng();
    spec.cost_mix = "affine";
    auto inst = generate_lot_sizing<R>(spec);
    auto sol = solve_classical_lspd(inst);
    // Classical wave bound: never below -(c_0 + f_0).
    CHECK(sol.final_wave >= -(inst.cost[0].fixed_part() + inst.cost[0].unit_part()));
    // Postprocessing invariant: each demand point contributes (strictly) to at
    // most one open order's fixed cost.
    const auto H = inst.holding_prefix();
    for (int t = 0; t < inst.periods(); ++t) {
      if (!(inst.demand[t] > R(0))) continue;
      int count = 0;
      for (const auto& o : sol.orders) {
        if (o.period > t) continue;
        if (sol.duals[t] > (o.line.s + H[t] - H[o.period]) * inst.demand[t]) ++count;
      }
      CHECK(count <= 1);
    }
  }
}

TEST_CASE("dual recovery scales by demand and sums to the primal") {
  std::mt19937_64 rng(20240530);
  for (int iter = 0; iter < 60; ++iter) {
    GeneratorSpec spec;
    spec.kind = "lot_sizing";
    spec.n = 1 + static_cast<int>(rng() % 10);
    spec.seed = rng();
    auto inst = generate_lot_sizing<R>(spec);
    auto sched = compute_tight_waves(inst);
    auto duals = recover_duals(sched, inst);
    const auto H = inst.holding_prefix();
    // v_t = d_t * (H[t] - W2(sigma(t))) with sigma(t) the owning entry.
    for (const auto& e : sched.entries)
      for (int t = e.period; t < e.upto; ++t)
        if (inst.demand[t] > R(0)) CHECK(duals[t] == inst.demand[t] * (H[t] - e.wave));
    R total(0);
    for (const auto& v : duals) total += v;
    CHECK(total == solve_concave_lspd(inst).primal_cost);
  }
}
