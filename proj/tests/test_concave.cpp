#include <doctest.h>

#include <random>

#include "concavepd/concave.hpp"

using concavepd::ConcaveFunction;
using concavepd::Rational;

namespace {

ConcaveFunction<Rational> spec_pwl() {
  return ConcaveFunction<Rational>::piecewise_linear_min(
      {{Rational(0), Rational(2)}, {Rational(2), Rational(1)}, {Rational(6), Rational(1, 2)}});
}

// Sampled families for the property checks.
std::vector<ConcaveFunction<Rational>> rational_zoo() {
  std::vector<ConcaveFunction<Rational>> fns;
  fns.push_back(ConcaveFunction<Rational>::fixed_charge(Rational(5)));
  fns.push_back(ConcaveFunction<Rational>::fixed_charge(Rational(0)));
  fns.push_back(ConcaveFunction<Rational>::affine_fixed(Rational(3), Rational(2)));
  fns.push_back(ConcaveFunction<Rational>::affine_fixed(Rational(0), Rational(1)));
  fns.push_back(spec_pwl());
  fns.push_back(ConcaveFunction<Rational>::piecewise_linear_min({{Rational(1), Rational(4)},
                                                                 {Rational(5), Rational(2)},
                                                                 {Rational(9), Rational(1)},
                                                                 {Rational(20), Rational(0)}}));
  return fns;
}

}  // namespace

TEST_CASE("eval examples") {
  auto fc = ConcaveFunction<Rational>::fixed_charge(Rational(5));
  CHECK(fc.eval(Rational(0)) == Rational(0));
  CHECK(fc.eval(Rational(3)) == Rational(5));
  CHECK(spec_pwl().eval(Rational(4)) == Rational(6));
  auto sqrt_cost = ConcaveFunction<double>::power(0.5, 1.0);
  CHECK(sqrt_cost.eval(9.0) == doctest::Approx(3.0));
  CHECK(sqrt_cost.eval(0.0) == 0.0);
  CHECK_THROWS_AS(fc.eval(Rational(-1)), std::domain_error);
}

TEST_CASE("right derivative examples") {
  auto sqrt_cost = ConcaveFunction<double>::power(0.5, 1.0);
  // Finite-difference reference at x = 4.
  double h = 1e-8;
  double fd = (sqrt_cost.eval(4.0 + h) - sqrt_cost.eval(4.0)) / h;
  CHECK(sqrt_cost.right_derivative(4.0) == doctest::Approx(0.25));
  CHECK(sqrt_cost.right_derivative(4.0) == doctest::Approx(fd).epsilon(1e-6));

  auto fc = ConcaveFunction<Rational>::fixed_charge(Rational(5));
  CHECK(fc.right_derivative(Rational(1)) == Rational(0));
  CHECK_THROWS_AS(fc.right_derivative(Rational(0)), std::domain_error);

  auto two_piece = ConcaveFunction<Rational>::piecewise_linear_min(
      {{Rational(0), Rational(2)}, {Rational(2), Rational(1)}});
  CHECK(two_piece.right_derivative(Rational(2)) == Rational(1));  // breakpoint: right piece
  CHECK(two_piece.right_derivative(Rational(1)) == Rational(2));
}

TEST_CASE("tangent examples") {
  auto fc = ConcaveFunction<Rational>::fixed_charge(Rational(5));
  auto t = fc.tangent_at(Rational(2));
  CHECK(t.f == Rational(5));
  CHECK(t.s == Rational(0));

  auto sqrt_cost = ConcaveFunction<double>::power(0.5, 1.0);
  auto ts = sqrt_cost.tangent_at(4.0);
  CHECK(ts.f == doctest::Approx(1.0));
  CHECK(ts.s == doctest::Approx(0.25));
  CHECK(ts.f + ts.s * 4.0 == doctest::Approx(sqrt_cost.eval(4.0)));

  auto aff = ConcaveFunction<Rational>::affine_fixed(Rational(3), Rational(2));
  auto ta = aff.tangent_at(Rational(7));
  CHECK(ta.f == Rational(3));
  CHECK(ta.s == Rational(2));

  CHECK_FALSE(sqrt_cost.has_zero_tangent());
  CHECK_THROWS_AS(sqrt_cost.tangent_at(0.0), std::domain_error);
  CHECK(ConcaveFunction<double>::power(1.0, 3.0).has_zero_tangent());
  auto t0 = fc.tangent_at(Rational(0));
  CHECK(t0.f == Rational(5));
  CHECK(t0.s == Rational(0));
}

TEST_CASE("fd slope examples") {
  auto fc = ConcaveFunction<Rational>::fixed_charge(Rational(5));
  CHECK(fc.fd_slope(Rational(3, 2), Rational(1)) == Rational(0));
  auto lin = ConcaveFunction<Rational>::affine_fixed(Rational(0), Rational(2));
  CHECK(lin.fd_slope(Rational(3), Rational(1)) == Rational(2));
  auto two_piece = ConcaveFunction<Rational>::piecewise_linear_min(
      {{Rational(0), Rational(2)}, {Rational(2), Rational(1)}});
  CHECK(two_piece.fd_slope(Rational(1), Rational(1)) == two_piece.eval(Rational(2)) - two_piece.eval(Rational(1)));
  CHECK_THROWS_AS(fc.fd_slope(Rational(1), Rational(0)), std::domain_error);
}

TEST_CASE("support, tightness and monotonicity over sampled points") {
  std::mt19937_64 rng(7);
  for (const auto& fn : rational_zoo()) {
    Rational prev_slope, prev_intercept;
    bool have_prev = false;
    for (int i = 1; i <= 40; ++i) {
      Rational p(static_cast<long long>(rng() % 200 + 1), static_cast<long long>(rng() % 4 + 1));
      auto tan = fn.tangent_at(p);
      // Tangency at the touch point.
      CHECK(tan.f + tan.s * p == fn.eval(p));
      // Support from above at sampled points.
      for (int q = 1; q <= 25; ++q) {
        Rational x(static_cast<long long>(rng() % 300 + 1), static_cast<long long>(rng() % 3 + 1));
        CHECK(tan.f + tan.s * x >= fn.eval(x));
      }
    }
    // Slope nonincreasing, intercept nondecreasing in the touch point.
    for (long long p = 1; p <= 30; ++p) {
      auto tan = fn.tangent_at(Rational(p));
      if (have_prev) {
        CHECK(tan.s <= prev_slope);
        CHECK(tan.f >= prev_intercept);
      }
      prev_slope = tan.s;
      prev_intercept = tan.f;
      have_prev = true;
    }
    // Nondecreasing and concave by sampling.
    Rational last = fn.eval(Rational(0));
    Rational last_slope;
    bool have_slope = false;
    for (long long x = 1; x <= 30; ++x) {
      Rational v = fn.eval(Rational(x));
      CHECK(v >= last);
      Rational slope = v - last;  // unit steps
      if (have_slope) CHECK(slope <= last_slope);
      last = v;
      last_slope = slope;
      have_slope = true;
    }
  }
}

TEST_CASE("pwl canonicalization drops dominated pieces") {
  auto fn = ConcaveFunction<Rational>::piecewise_linear_min({{Rational(0), Rational(2)},
                                                             {Rational(100), Rational(1)},
                                                             {Rational(2), Rational(1)},
                                                             {Rational(1), Rational(3)}});
  // (1,3) is dominated by (0,2); (100,1) by (2,1).
  REQUIRE(fn.pieces().size() == 2);
  CHECK(fn.pieces()[0] == std::pair<Rational, Rational>{Rational(0), Rational(2)});
  CHECK(fn.pieces()[1] == std::pair<Rational, Rational>{Rational(2), Rational(1)});
  CHECK_THROWS(ConcaveFunction<Rational>::piecewise_linear_min({}));
  CHECK_THROWS(ConcaveFunction<Rational>::piecewise_linear_min({{Rational(-1), Rational(1)}}));
}

TEST_CASE("power rejected in the exact backend") {
  CHECK_THROWS(ConcaveFunction<Rational>::power(0.5, 1.0));
}
