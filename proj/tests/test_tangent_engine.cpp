#include <doctest.h>

#include <algorithm>
#include <random>

#include "concavepd/tangent_engine.hpp"
#include "support/simulate.hpp"

using namespace concavepd;
using testsupport::simulate_first_tight;

namespace {

using R = Rational;

ConcaveFunction<R> spec_pwl() {
  return ConcaveFunction<R>::piecewise_linear_min({{R(0), R(2)}, {R(2), R(1)}, {R(6), R(1, 2)}});
}

ConcaveFunction<R> random_cost(std::mt19937_64& rng) {
  if (rng() % 2 == 0)
    return ConcaveFunction<R>::fixed_charge(R(static_cast<long long>(rng() % 30)));
  int pieces = 2 + static_cast<int>(rng() % 3);
  std::vector<std::pair<R, R>> ps;
  long long slope = 3 + static_cast<long long>(rng() % 6);
  long long f = static_cast<long long>(rng() % 4);
  for (int p = 0; p < pieces; ++p) {
    ps.push_back({R(f), R(slope)});
    slope -= 1 + static_cast<long long>(rng() % 2);
    if (slope < 0) slope = 0;
    f += 1 + static_cast<long long>(rng() % 8);
  }
  return ConcaveFunction<R>::piecewise_linear_min(std::move(ps));
}

// Start-feasible profile: no line tight or over-tight already at t = 0 (such
// states only arise exactly at event instants, which the run processes
// immediately).
bool start_feasible(const ConcaveFunction<R>& fn, const RateProfile<R>& profile) {
  auto sim = simulate_first_tight(fn, profile);
  return !sim || sim->time > R(0);
}

RateProfile<R> random_mixed_profile(std::mt19937_64& rng, const ConcaveFunction<R>& fn, int m) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    RateProfile<R> profile;
    bool any_growth = false;
    for (int i = 0; i < m; ++i) {
      R d(static_cast<long long>(rng() % 5 + 1));
      bool growing = rng() % 2 == 0;
      profile.demands.push_back(d);
      profile.budgets.push_back(growing ? R(0) : R(static_cast<long long>(rng() % 12)));
      profile.rates.push_back(growing ? d : R(0));
      if (growing) any_growth = true;
    }
    if (!any_growth) {
      profile.rates[0] = profile.demands[0];
      profile.budgets[0] = R(0);
    }
    if (start_feasible(fn, profile)) return profile;
  }
  RateProfile<R> profile;
  profile.demands = {R(1)};
  profile.budgets = {R(0)};
  profile.rates = {R(1)};
  return profile;
}

RateProfile<R> random_general_profile(std::mt19937_64& rng, const ConcaveFunction<R>& fn, int m) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    RateProfile<R> profile;
    bool any_growth = false;
    for (int i = 0; i < m; ++i) {
      profile.demands.push_back(R(static_cast<long long>(rng() % 5 + 1)));
      profile.budgets.push_back(R(static_cast<long long>(rng() % 10)));
      R rate(static_cast<long long>(rng() % 5));
      profile.rates.push_back(rate);
      if (rate > R(0)) any_growth = true;
    }
    if (!any_growth) profile.rates[0] = R(1);
    if (start_feasible(fn, profile)) return profile;
  }
  RateProfile<R> profile;
  profile.demands = {R(1)};
  profile.budgets = {R(0)};
  profile.rates = {R(1)};
  return profile;
}

// The engine's winning tangent must be one of the simulator's first-tight
// support lines, at the same time.
void check_against_simulation(const ConcaveFunction<R>& fn, const RateProfile<R>& profile,
                              const TightTangentResult<R>& got) {
  auto sim = simulate_first_tight(fn, profile);
  REQUIRE(sim.has_value());
  CHECK(got.t_star == sim->time);
  auto line = fn.tangent_at(got.p_star);
  bool matched = false;
  for (const auto& [f, s] : sim->tight_lines)
    if (f == line.f && s == line.s) matched = true;
  CHECK(matched);
}

}  // namespace

TEST_CASE("zero-budget first tight examples") {
  auto r = first_tight_zero_budgets(spec_pwl(), {R(1), R(3)});
  CHECK(r.p_star == R(4));
  CHECK(r.t_star == R(3, 2));
  {
    // Brute force over the three pieces at p = 4.
    auto fn = spec_pwl();
    R best(0);
    bool have = false;
    for (const auto& [f, s] : fn.pieces()) {
      R t = s + f / R(4);
      if (!have || t < best) {
        best = t;
        have = true;
      }
    }
    CHECK(best == r.t_star);
  }

  auto lin = ConcaveFunction<R>::affine_fixed(R(0), R(1));
  auto rl = first_tight_zero_budgets(lin, {R(1)});
  CHECK(rl.p_star == R(1));
  CHECK(rl.t_star == R(1));

  auto fc = ConcaveFunction<R>::fixed_charge(R(6));
  auto rf = first_tight_zero_budgets(fc, {R(2), R(1)});
  CHECK(rf.p_star == R(3));
  CHECK(rf.t_star == R(2));

  CHECK_THROWS(first_tight_zero_budgets(fc, {}));
}

TEST_CASE("mixed first tight examples") {
  auto fc = ConcaveFunction<R>::fixed_charge(R(6));
  {
    RateProfile<R> p;
    p.demands = {R(2), R(1)};
    p.budgets = {R(0), R(3)};
    p.rates = {R(2), R(0)};
    auto r = first_tight_mixed(fc, p);
    REQUIRE(r.has_value());
    CHECK(r->p_star == R(3));
    CHECK(r->t_star == R(3, 2));
    // Cross-check: contributions 2t + 3 reach 6 at t = 3/2.
    CHECK(contribution_at(p, R(0), r->t_star) == R(6));
  }
  {
    // Zero-budget connected customer never contributes.
    RateProfile<R> p;
    p.demands = {R(2), R(1)};
    p.budgets = {R(0), R(0)};
    p.rates = {R(2), R(0)};
    auto r = first_tight_mixed(fc, p);
    REQUIRE(r.has_value());
    CHECK(r->p_star == R(2));
    CHECK(r->t_star == R(3));
    check_against_simulation(fc, p, *r);
  }
  {
    // All growing with zero budgets reduces to the zero-budget case.
    RateProfile<R> p;
    p.demands = {R(1), R(3)};
    p.budgets = {R(0), R(0)};
    p.rates = {R(1), R(3)};
    auto r = first_tight_mixed(spec_pwl(), p);
    auto z = first_tight_zero_budgets(spec_pwl(), {R(1), R(3)});
    REQUIRE(r.has_value());
    CHECK(r->p_star == z.p_star);
    CHECK(r->t_star == z.t_star);
  }
  {
    // Nothing grows: no tangent ever becomes tight.
    RateProfile<R> p;
    p.demands = {R(1)};
    p.budgets = {R(5)};
    p.rates = {R(0)};
    CHECK_FALSE(first_tight_mixed(fc, p).has_value());
  }
}

TEST_CASE("breakpoint schedule examples") {
  {
    RateProfile<R> p;
    p.demands = {R(1), R(1)};
    p.budgets = {R(0), R(1)};
    p.rates = {R(2), R(1)};
    auto sched = compute_breakpoints(p);
    REQUIRE(sched.thetas.size() == 1);
    CHECK(sched.thetas[0] == R(1));
  }
  {
    RateProfile<R> p;
    p.demands = {R(2), R(2)};
    p.budgets = {R(3), R(3)};
    p.rates = {R(1), R(1)};
    auto sched = compute_breakpoints(p);
    CHECK(sched.thetas.empty());
  }
  {
    RateProfile<R> p;
    p.demands = {R(1), R(1), R(1)};
    p.budgets = {R(0), R(0), R(2)};
    p.rates = {R(3), R(2), R(1)};
    auto sched = compute_breakpoints(p);
    REQUIRE(sched.thetas.size() == 2);
    CHECK(sched.thetas[0] == R(1));
    CHECK(sched.thetas[1] == R(2));
    CHECK(sched.permutations.size() == 3);
    // R <= m(m-1)/2 and the prefix-family bound.
    CHECK(sched.thetas.size() <= 3);
    CHECK(sched.prefix_family.size() <= (3 + 1) * (3 + 1));
  }
}

TEST_CASE("general first tight examples") {
  auto fc = ConcaveFunction<R>::fixed_charge(R(4));
  {
    RateProfile<R> p;
    p.demands = {R(1), R(1)};
    p.budgets = {R(0), R(1)};
    p.rates = {R(2), R(1)};
    auto r = first_tight_general(fc, p);
    REQUIRE(r.has_value());
    check_against_simulation(fc, p, *r);
  }
  {
    // rates = demands, zero budgets: single setting with the full set.
    RateProfile<R> p;
    p.demands = {R(2), R(3)};
    p.budgets = {R(0), R(0)};
    p.rates = {R(2), R(3)};
    auto r = first_tight_general(fc, p);
    auto z = first_tight_zero_budgets(fc, {R(2), R(3)});
    REQUIRE(r.has_value());
    CHECK(r->p_star == z.p_star);
    CHECK(r->t_star == z.t_star);
  }
  {
    RateProfile<R> p;
    p.demands = {R(1)};
    p.budgets = {R(1)};
    p.rates = {R(0)};
    CHECK_FALSE(first_tight_general(fc, p).has_value());
  }
}

TEST_CASE("oracle equivalence on random mixed profiles") {
  std::mt19937_64 rng(20240517);
  for (int iter = 0; iter < 500; ++iter) {
    auto fn = random_cost(rng);
    auto profile = random_mixed_profile(rng, fn, 1 + static_cast<int>(rng() % 6));
    auto r = first_tight_mixed(fn, profile);
    REQUIRE(r.has_value());
    check_against_simulation(fn, profile, *r);
  }
}

TEST_CASE("oracle equivalence on random general profiles") {
  std::mt19937_64 rng(20240518);
  for (int iter = 0; iter < 300; ++iter) {
    auto fn = random_cost(rng);
    auto profile = random_general_profile(rng, fn, 1 + static_cast<int>(rng() % 6));
    auto r = first_tight_general(fn, profile);
    REQUIRE(r.has_value());
    check_against_simulation(fn, profile, *r);
  }
}

TEST_CASE("general agrees with mixed on mixed-rate profiles") {
  std::mt19937_64 rng(20240519);
  for (int iter = 0; iter < 200; ++iter) {
    auto fn = random_cost(rng);
    auto profile = random_mixed_profile(rng, fn, 1 + static_cast<int>(rng() % 6));
    auto a = first_tight_mixed(fn, profile);
    auto b = first_tight_general(fn, profile);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->t_star == b->t_star);
    auto la = fn.tangent_at(a->p_star);
    auto lb = fn.tangent_at(b->p_star);
    CHECK(la.f == lb.f);
    CHECK(la.s == lb.s);
  }
}

TEST_CASE("contribution identities of the alternate settings") {
  std::mt19937_64 rng(20240520);
  int equality_hits = 0;
  for (int iter = 0; iter < 120; ++iter) {
    auto fn = random_cost(rng);
    auto profile = random_mixed_profile(rng, fn, 2 + static_cast<int>(rng() % 5));
    auto settings = mixed_alternate_settings(fn, profile);
    auto lines = testsupport::explicit_lines(fn);
    for (int trial = 0; trial < 4; ++trial) {
      R t(static_cast<long long>(rng() % 12), static_cast<long long>(rng() % 3 + 1));
      for (const auto& line : lines) {
        R omega = contribution_at(profile, line.second, t);
        for (const auto& setting : settings) {
          R tau = setting.beta + setting.alpha * t;
          R omega_alt(0);
          for (int i : setting.customers) {
            R excess = (tau - line.second) * profile.demands[i];
            if (excess > R(0)) omega_alt += excess;
          }
          // Never more than the true contribution...
          CHECK(omega >= omega_alt);
          // ...and equal when the line's contributor set matches the setting.
          bool matches = true;
          for (std::size_t i = 0; i < profile.size(); ++i) {
            bool contributes =
                profile.budgets[i] + t * profile.rates[i] >= line.second * profile.demands[i];
            bool member = std::find(setting.customers.begin(), setting.customers.end(),
                                    static_cast<int>(i)) != setting.customers.end();
            if (contributes != member) {
              matches = false;
              break;
            }
          }
          if (matches) {
            CHECK(omega == omega_alt);
            ++equality_hits;
          }
        }
      }
    }
  }
  CHECK(equality_hits > 200);
}

TEST_CASE("tie structure: never three distinct tight support lines") {
  std::mt19937_64 rng(20240521);
  for (int iter = 0; iter < 400; ++iter) {
    auto fn = random_cost(rng);
    auto profile = random_mixed_profile(rng, fn, 1 + static_cast<int>(rng() % 6));
    auto sim = simulate_first_tight(fn, profile);
    if (!sim) continue;
    CHECK(sim->tight_lines.size() <= 2);
  }
}

TEST_CASE("per-unit budget order implies touch point order") {
  std::mt19937_64 rng(20240522);
  for (int iter = 0; iter < 100; ++iter) {
    auto fn = random_cost(rng);
    auto profile = random_general_profile(rng, fn, 2 + static_cast<int>(rng() % 5));
    auto lines = testsupport::explicit_lines(fn);
    std::sort(lines.begin(), lines.end(),
              [](const auto& a, const auto& b) { return b.second < a.second; });
    R t(static_cast<long long>(rng() % 10), static_cast<long long>(rng() % 3 + 1));
    auto leftmost = [&](std::size_t i) {
      R per_unit = (profile.budgets[i] + t * profile.rates[i]) / profile.demands[i];
      for (std::size_t q = 0; q < lines.size(); ++q)
        if (per_unit >= lines[q].second) return static_cast<int>(q);
      return static_cast<int>(lines.size());
    };
    for (std::size_t i = 0; i < profile.size(); ++i)
      for (std::size_t j = 0; j < profile.size(); ++j) {
        R pi = (profile.budgets[i] + t * profile.rates[i]) / profile.demands[i];
        R pj = (profile.budgets[j] + t * profile.rates[j]) / profile.demands[j];
        if (pi > pj) CHECK(leftmost(i) <= leftmost(j));
        if (pi == pj) CHECK(leftmost(i) == leftmost(j));
      }
  }
}
