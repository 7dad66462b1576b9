#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "concavepd/facility.hpp"
#include "concavepd/jrp.hpp"
#include "concavepd/lot_sizing.hpp"

namespace concavepd {

// Deterministic instance generation: the same spec and seed always produce the
// same instance (and hence byte-identical JSON).
struct GeneratorSpec {
  std::string kind = "facility_location";  // facility_location | lot_sizing | jrp
  int m = 4;       // customers (facility location)
  int n = 4;       // facilities / periods
  int K = 2;       // items (jrp)
  std::uint64_t seed = 1;
  std::string cost_mix = "mixed";  // fixed | affine | pwl | mixed | power
  int demand_max = 9;
  int pwl_max_pieces = 4;
  bool allow_zero_demand = false;  // lot-sizing/jrp rows may contain zeros regardless
};

namespace gendetail {

inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

template <class Num>
ConcaveFunction<Num> random_cost(std::mt19937_64& rng, const std::string& mix, int max_pieces = 4) {
  int family;
  if (mix == "fixed")
    family = 0;
  else if (mix == "affine")
    family = 1;
  else if (mix == "pwl")
    family = 2;
  else if (mix == "power")
    family = 3;
  else
    family = static_cast<int>(draw(rng, 0, 2));
  switch (family) {
    case 0:
      return ConcaveFunction<Num>::fixed_charge(num_traits<Num>::from_int(draw(rng, 0, 40)));
    case 1:
      return ConcaveFunction<Num>::affine_fixed(num_traits<Num>::from_int(draw(rng, 0, 30)),
                                                num_traits<Num>::from_int(draw(rng, 0, 5)));
    case 2: {
      // Decreasing slopes with increasing intercepts; canonicalization drops
      // whatever ends up dominated.
      int pieces = static_cast<int>(draw(rng, 2, std::max(2, max_pieces)));
      std::vector<std::pair<Num, Num>> ps;
      long long slope = static_cast<long long>(draw(rng, pieces, 8));
      long long intercept = static_cast<long long>(draw(rng, 0, 6));
      for (int p = 0; p < pieces; ++p) {
        ps.push_back({num_traits<Num>::from_int(intercept), num_traits<Num>::from_int(slope)});
        slope -= static_cast<long long>(draw(rng, 1, std::max<long long>(1, slope > 1 ? slope - 1 : 1)));
        if (slope < 0) slope = 0;
        intercept += static_cast<long long>(draw(rng, 1, 12));
      }
      return ConcaveFunction<Num>::piecewise_linear_min(std::move(ps));
    }
    default:
      if constexpr (std::is_same_v<Num, double>) {
        double exponents[] = {0.3, 0.5, 0.7, 1.0};
        return ConcaveFunction<Num>::power(exponents[draw(rng, 0, 3)],
                                           static_cast<double>(draw(rng, 1, 10)));
      } else {
        return ConcaveFunction<Num>::fixed_charge(num_traits<Num>::from_int(draw(rng, 0, 40)));
      }
  }
}

}  // namespace gendetail

// Metric construction: points on an integer grid with L1 distances.
template <class Num>
FacilityInstance<Num> generate_facility(const GeneratorSpec& spec) {
  if (spec.m <= 0 || spec.n <= 0) throw std::invalid_argument("facility instance needs m, n >= 1");
  std::mt19937_64 rng(spec.seed);
  FacilityInstance<Num> inst;
  std::vector<std::pair<long long, long long>> cust, fac;
  for (int i = 0; i < spec.m; ++i)
    cust.push_back({static_cast<long long>(gendetail::draw(rng, 0, 20)),
                    static_cast<long long>(gendetail::draw(rng, 0, 20))});
  for (int j = 0; j < spec.n; ++j)
    fac.push_back({static_cast<long long>(gendetail::draw(rng, 0, 20)),
                   static_cast<long long>(gendetail::draw(rng, 0, 20))});
  for (int i = 0; i < spec.m; ++i)
    inst.demand.push_back(num_traits<Num>::from_int(gendetail::draw(rng, 1, spec.demand_max)));
  inst.connect.assign(spec.m, {});
  for (int i = 0; i < spec.m; ++i)
    for (int j = 0; j < spec.n; ++j) {
      long long dist = std::abs(cust[i].first - fac[j].first) + std::abs(cust[i].second - fac[j].second);
      inst.connect[i].push_back(num_traits<Num>::from_int(dist));
    }
  for (int j = 0; j < spec.n; ++j) inst.cost.push_back(gendetail::random_cost<Num>(rng, spec.cost_mix, spec.pwl_max_pieces));
  inst.validate();
  return inst;
}

template <class Num>
LotSizingInstance<Num> generate_lot_sizing(const GeneratorSpec& spec) {
  if (spec.n <= 0) throw std::invalid_argument("lot-sizing instance needs n >= 1");
  std::mt19937_64 rng(spec.seed);
  LotSizingInstance<Num> inst;
  for (int t = 0; t < spec.n; ++t) {
    bool zero = gendetail::draw(rng, 0, 4) == 0;  // sprinkle zero-demand periods
    inst.demand.push_back(zero ? num_traits<Num>::zero()
                               : num_traits<Num>::from_int(gendetail::draw(rng, 1, spec.demand_max)));
  }
  for (int t = 0; t + 1 < spec.n; ++t)
    inst.holding.push_back(num_traits<Num>::from_int(gendetail::draw(rng, 0, 3)));
  for (int t = 0; t < spec.n; ++t) inst.cost.push_back(gendetail::random_cost<Num>(rng, spec.cost_mix, spec.pwl_max_pieces));
  inst.validate();
  return inst;
}

template <class Num>
JrpInstance<Num> generate_jrp(const GeneratorSpec& spec) {
  if (spec.n <= 0 || spec.K <= 0) throw std::invalid_argument("jrp instance needs n, K >= 1");
  std::mt19937_64 rng(spec.seed);
  JrpInstance<Num> inst;
  inst.joint_fixed = num_traits<Num>::from_int(gendetail::draw(rng, 0, 20));
  for (int k = 0; k < spec.K; ++k) inst.item_cost.push_back(gendetail::random_cost<Num>(rng, spec.cost_mix, spec.pwl_max_pieces));
  inst.demand.assign(spec.K, {});
  inst.holding.assign(spec.K, {});
  for (int k = 0; k < spec.K; ++k) {
    for (int t = 0; t < spec.n; ++t) {
      bool zero = gendetail::draw(rng, 0, 3) == 0;
      inst.demand[k].push_back(zero ? num_traits<Num>::zero()
                                    : num_traits<Num>::from_int(gendetail::draw(rng, 1, spec.demand_max)));
    }
    for (int t = 0; t + 1 < spec.n; ++t)
      inst.holding[k].push_back(num_traits<Num>::from_int(gendetail::draw(rng, 0, 3)));
  }
  inst.validate();
  return inst;
}

}  // namespace concavepd
