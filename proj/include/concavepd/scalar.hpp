#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "concavepd/rational.hpp"

namespace concavepd {

// The solvers are templated on the scalar type: `Rational` for exact runs and
// certificates, `double` for Power costs and benchmarks. num_traits carries
// the few operations whose meaning differs between the two.
template <class Num>
struct num_traits;

template <>
struct num_traits<Rational> {
  static constexpr bool exact = true;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool eq(const Rational& a, const Rational& b) { return a == b; }
  static bool le(const Rational& a, const Rational& b) { return a <= b; }
  static double to_double(const Rational& v) { return v.to_double(); }
  static Rational from_int(long long v) { return Rational(v); }
  static long long floor(const Rational& v) { return static_cast<long long>(v.floor()); }
  static std::string str(const Rational& v) { return v.str(); }
};

template <>
struct num_traits<double> {
  static constexpr bool exact = false;
  // Relative tolerance for float comparisons throughout the float backend.
  static constexpr double rel_tol = 1e-9;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static bool eq(double a, double b) {
    double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
    return std::fabs(a - b) <= rel_tol * scale;
  }
  static bool le(double a, double b) {
    double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
    return a <= b + rel_tol * scale;
  }
  static double to_double(double v) { return v; }
  static double from_int(long long v) { return static_cast<double>(v); }
  static long long floor(double v) { return static_cast<long long>(std::floor(v)); }
  static std::string str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
};

}  // namespace concavepd
