#include <doctest.h>

#include <random>

#include "concavepd/generator.hpp"
#include "concavepd/io.hpp"

using namespace concavepd;

namespace {
using R = Rational;
}

TEST_CASE("cost function schemas") {
  auto fc = concave_from_json<R>(json::parse(R"({"kind":"fixed_charge","F":5})"));
  CHECK(fc.kind() == ConcaveFunction<R>::Kind::FixedCharge);
  CHECK(fc.fixed_part() == R(5));
  CHECK(to_json(fc) == json::parse(R"({"kind":"fixed_charge","F":5})"));

  auto af = concave_from_json<R>(json::parse(R"({"kind":"affine_fixed","F":3,"c":2})"));
  CHECK(af.unit_part() == R(2));

  auto pw = concave_from_json<R>(json::parse(R"({"kind":"pwl_min","pieces":[[0,2],[2,1],[6,"1/2"]]})"));
  CHECK(pw.pieces().size() == 3);
  CHECK(pw.pieces()[2].second == R(1, 2));
  CHECK(to_json(pw).at("pieces").at(2).at(1).get<std::string>() == "1/2");

  auto pow_fn = concave_from_json<double>(json::parse(R"({"kind":"power","a":0.5,"scale":1})"));
  CHECK(pow_fn.eval(9.0) == doctest::Approx(3.0));
  CHECK_THROWS(concave_from_json<R>(json::parse(R"({"kind":"power","a":0.5,"scale":1})")));
  CHECK_THROWS(concave_from_json<R>(json::parse(R"({"kind":"nope"})")));
}

TEST_CASE("rational literals") {
  CHECK(num_from_json<R>(json::parse(R"("3/7")")) == R(3, 7));
  CHECK(num_from_json<R>(json(12)) == R(12));
  CHECK(num_to_json<R>(R(3, 7)) == json("3/7"));
  CHECK(num_to_json<R>(R(4)) == json(4));
  CHECK_THROWS(num_from_json<R>(json(0.5)));
  CHECK(num_from_json<double>(json(0.5)) == 0.5);
  CHECK(num_from_json<double>(json::parse(R"("1/2")")) == 0.5);
}

TEST_CASE("instance round trips") {
  std::mt19937_64 rng(20240613);
  for (int iter = 0; iter < 30; ++iter) {
    GeneratorSpec spec;
    spec.seed = rng();
    spec.kind = "facility_location";
    spec.m = 1 + static_cast<int>(rng() % 5);
    spec.n = 1 + static_cast<int>(rng() % 4);
    auto fl = generate_facility<R>(spec);
    auto fl_json = to_json(fl);
    CHECK(to_json(facility_from_json<R>(fl_json)) == fl_json);

    spec.kind = "lot_sizing";
    auto ls = generate_lot_sizing<R>(spec);
    auto ls_json = to_json(ls);
    CHECK(to_json(lot_sizing_from_json<R>(ls_json)) == ls_json);
    CHECK(instance_type(ls_json) == "lot_sizing");

    spec.kind = "jrp";
    spec.K = 1 + static_cast<int>(rng() % 3);
    auto jr = generate_jrp<R>(spec);
    auto jr_json = to_json(jr);
    CHECK(to_json(jrp_from_json<R>(jr_json)) == jr_json);
  }
}

TEST_CASE("generation is deterministic") {
  GeneratorSpec spec;
  spec.kind = "facility_location";
  spec.m = 5;
  spec.n = 4;
  spec.seed = 123;
  auto a = to_json(generate_facility<R>(spec)).dump();
  auto b = to_json(generate_facility<R>(spec)).dump();
  CHECK(a == b);
  spec.seed = 124;
  CHECK(a != to_json(generate_facility<R>(spec)).dump());
}

TEST_CASE("solution serialization carries the certificate data") {
  GeneratorSpec spec;
  spec.kind = "lot_sizing";
  spec.n = 5;
  spec.seed = 5;
  auto inst = generate_lot_sizing<R>(spec);
  auto sol = solve_concave_lspd(inst);
  auto j = to_json(sol, /*with_trace=*/true);
  CHECK(j.contains("serve"));
  CHECK(j.contains("orders"));
  CHECK(j.contains("v"));
  CHECK(j.contains("trace"));
  CHECK(num_from_json<R>(j.at("primal_cost")) == sol.primal_cost);
}
