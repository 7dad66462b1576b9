#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "concavepd/scalar.hpp"

namespace concavepd {

// Support line f + s*x of a concave cost function, touching it at `p`.
template <class Num>
struct Tangent {
  Num f;  // intercept
  Num s;  // slope
  Num p;  // touch point

  Num value_at(const Num& x) const { return f + s * x; }
};

// Nondecreasing concave cost with value 0 at 0, from one of four families.
// Answers value, right-derivative and tangent queries in O(1) (O(log P) for
// piecewise-linear costs).
template <class Num>
class ConcaveFunction {
 public:
  enum class Kind { FixedCharge, AffineFixed, Power, PiecewiseLinearMin };

  static ConcaveFunction fixed_charge(Num charge) {
    check_nonneg(charge, "fixed charge");
    ConcaveFunction fn(Kind::FixedCharge);
    fn.fixed_ = std::move(charge);
    return fn;
  }

  static ConcaveFunction affine_fixed(Num charge, Num unit_cost) {
    check_nonneg(charge, "fixed charge");
    check_nonneg(unit_cost, "unit cost");
    ConcaveFunction fn(Kind::AffineFixed);
    fn.fixed_ = std::move(charge);
    fn.unit_ = std::move(unit_cost);
    return fn;
  }

  // scale * x^a with a in (0,1]. Float backend only.
  static ConcaveFunction power(double exponent, double scale) {
    static_assert(std::is_same_v<Num, double> || true, "");
    if constexpr (!std::is_same_v<Num, double>) {
      throw std::domain_error("power costs require the float backend");
    } else {
      if (!(exponent > 0.0 && exponent <= 1.0)) throw std::domain_error("power exponent must be in (0,1]");
      if (scale < 0.0) throw std::domain_error("power scale must be >= 0");
      ConcaveFunction fn(Kind::Power);
      fn.exponent_ = exponent;
      fn.scale_ = scale;
      return fn;
    }
  }

  // min over pieces of f + s*x on (0, +inf). Pieces are canonicalized: sorted
  // by decreasing slope, duplicates and dominated pieces dropped.
  static ConcaveFunction piecewise_linear_min(std::vector<std::pair<Num, Num>> pieces) {
    if (pieces.empty()) throw std::domain_error("piecewise cost needs at least one piece");
    for (const auto& [f, s] : pieces) {
      check_nonneg(f, "piece intercept");
      check_nonneg(s, "piece slope");
    }
    ConcaveFunction fn(Kind::PiecewiseLinearMin);
    fn.pieces_ = canonicalize(std::move(pieces));
    return fn;
  }

  Kind kind() const { return kind_; }
  const std::vector<std::pair<Num, Num>>& pieces() const { return pieces_; }
  Num fixed_part() const { return fixed_; }
  Num unit_part() const { return unit_; }
  double power_exponent() const { return exponent_; }
  double power_scale() const { return scale_; }

  // A zero-touch-point tangent exists unless the slope blows up at 0.
  bool has_zero_tangent() const {
    if constexpr (std::is_same_v<Num, double>) {
      if (kind_ == Kind::Power) return exponent_ == 1.0;
    }
    return true;
  }

  Num eval(const Num& x) const {
    if (x < num_traits<Num>::zero()) throw std::domain_error("concave cost evaluated at negative point");
    if (num_traits<Num>::eq(x, num_traits<Num>::zero())) return num_traits<Num>::zero();
    switch (kind_) {
      case Kind::FixedCharge:
        return fixed_;
      case Kind::AffineFixed:
        return fixed_ + unit_ * x;
      case Kind::Power:
        if constexpr (std::is_same_v<Num, double>) return scale_ * std::pow(x, exponent_);
        throw std::logic_error("power cost in exact backend");
      case Kind::PiecewiseLinearMin: {
        Num best = pieces_.front().first + pieces_.front().second * x;
        for (std::size_t i = 1; i < pieces_.size(); ++i) {
          Num v = pieces_[i].first + pieces_[i].second * x;
          if (v < best) best = v;
        }
        return best;
      }
    }
    throw std::logic_error("unreachable");
  }

  Num right_derivative(const Num& x) const {
    if (!(x > num_traits<Num>::zero())) throw std::domain_error("right derivative requires a positive point");
    switch (kind_) {
      case Kind::FixedCharge:
        return num_traits<Num>::zero();
      case Kind::AffineFixed:
        return unit_;
      case Kind::Power:
        if constexpr (std::is_same_v<Num, double>) return scale_ * exponent_ * std::pow(x, exponent_ - 1.0);
        throw std::logic_error("power cost in exact backend");
      case Kind::PiecewiseLinearMin:
        return active_piece_right(x).second;
    }
    throw std::logic_error("unreachable");
  }

  // Tangent at touch point p >= 0; at p = 0 the limit tangent. Throws when the
  // limit slope is infinite (Power with exponent < 1): callers must keep to
  // p > 0 for such costs.
  Tangent<Num> tangent_at(const Num& p) const {
    Num zero = num_traits<Num>::zero();
    if (p < zero) throw std::domain_error("tangent touch point must be >= 0");
    if (num_traits<Num>::eq(p, zero)) {
      if (!has_zero_tangent()) throw std::domain_error("no zero tangent: slope diverges at 0");
      switch (kind_) {
        case Kind::FixedCharge:
          return {fixed_, zero, zero};
        case Kind::AffineFixed:
          return {fixed_, unit_, zero};
        case Kind::Power:
          if constexpr (std::is_same_v<Num, double>) return {0.0, scale_, 0.0};
          throw std::logic_error("power cost in exact backend");
        case Kind::PiecewiseLinearMin:
          return {pieces_.front().first, pieces_.front().second, zero};
      }
    }
    Num s = right_derivative(p);
    Num f = eval(p) - p * s;
    return {f, s, p};
  }

  // Steepest support line at p: at a breakpoint of a piecewise cost this is
  // the left piece; elsewhere it coincides with tangent_at.
  Tangent<Num> tangent_at_steep(const Num& p) const {
    if (kind_ != Kind::PiecewiseLinearMin || num_traits<Num>::eq(p, num_traits<Num>::zero()))
      return tangent_at(p);
    std::size_t best = 0;
    Num best_v = pieces_[0].first + pieces_[0].second * p;
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      Num v = pieces_[i].first + pieces_[i].second * p;
      if (v < best_v) {
        best = i;
        best_v = v;
      }
    }
    return {pieces_[best].first, pieces_[best].second, p};
  }

  // Difference quotient (phi(floor(x+delta)) - phi(floor(x))) / delta, the
  // derivative-free slope usable when demands live on a 1/delta grid.
  Num fd_slope(const Num& x, const Num& delta) const {
    if (!(delta > num_traits<Num>::zero())) throw std::domain_error("fd_slope needs delta > 0");
    Num lo = num_traits<Num>::from_int(num_traits<Num>::floor(x));
    Num hi = num_traits<Num>::from_int(num_traits<Num>::floor(x + delta));
    return (eval(hi) - eval(lo)) / delta;
  }

 private:
  explicit ConcaveFunction(Kind kind) : kind_(kind) {}

  static void check_nonneg(const Num& v, const char* what) {
    if (v < num_traits<Num>::zero()) throw std::domain_error(std::string(what) + " must be >= 0");
  }

  // Piece active immediately to the right of x (min slope among minimizers).
  const std::pair<Num, Num>& active_piece_right(const Num& x) const {
    std::size_t best = 0;
    Num best_v = pieces_[0].first + pieces_[0].second * x;
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      Num v = pieces_[i].first + pieces_[i].second * x;
      // Pieces are sorted by decreasing slope, so a later minimizer wins.
      if (v < best_v || num_traits<Num>::eq(v, best_v)) {
        if (v < best_v || pieces_[i].second < pieces_[best].second) {
          best = i;
          best_v = v;
        }
      }
    }
    return pieces_[best];
  }

  static std::vector<std::pair<Num, Num>> canonicalize(std::vector<std::pair<Num, Num>> pieces) {
    // Sort by decreasing slope, then increasing intercept.
    std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return b.second < a.second;
      return a.first < b.first;
    });
    // Equal slopes: keep the lowest intercept.
    std::vector<std::pair<Num, Num>> dedup;
    for (auto& pc : pieces) {
      if (!dedup.empty() && num_traits<Num>::eq(dedup.back().second, pc.second)) continue;
      dedup.push_back(pc);
    }
    // Lower-envelope scan: with slopes strictly decreasing, an incoming piece
    // overtakes the stack top from their crossing point on; the top survives
    // only if it keeps a nonempty activity interval.
    std::vector<std::pair<Num, Num>> env;
    std::vector<Num> start;  // activity start of env[i]
    for (auto& pc : dedup) {
      while (!env.empty()) {
        Num x = (pc.first - env.back().first) / (env.back().second - pc.second);
        if (x > start.back()) {
          start.push_back(x);
          break;
        }
        env.pop_back();
        start.pop_back();
      }
      if (env.empty()) start.push_back(num_traits<Num>::zero());
      env.push_back(pc);
    }
    return env;
  }

  Kind kind_;
  Num fixed_{};
  Num unit_{};
  double exponent_ = 1.0;
  double scale_ = 0.0;
  std::vector<std::pair<Num, Num>> pieces_;
};

}  // namespace concavepd
