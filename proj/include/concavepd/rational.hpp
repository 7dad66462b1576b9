#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace concavepd {

// Exact rational arithmetic over checked 128-bit integers. Overflow throws
// instead of wrapping; the generators keep instance data small enough that
// well-formed runs never hit the limit.
class Rational {
 public:
  using Int = __int128;

  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(int n) : num_(n), den_(1) {}
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  static Rational from_parts(Int n, Int d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    r.normalize();
    return r;
  }

  Int num() const { return num_; }
  Int den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_integer() const { return den_ == 1; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_parts(checked_add(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
                      checked_mul(a.den_, b.den_));
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_parts(checked_sub(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
                      checked_mul(a.den_, b.den_));
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_parts(checked_mul(a.num_, b.num_), checked_mul(a.den_, b.den_));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return from_parts(checked_mul(a.num_, b.den_), checked_mul(a.den_, b.num_));
  }
  Rational operator-() const { return from_parts(-num_, den_); }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return checked_mul(a.num_, b.den_) < checked_mul(b.num_, a.den_);
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  // Largest integer <= value.
  Int floor() const {
    Int q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const {
    std::string s = int_to_string(num_);
    if (den_ != 1) s += "/" + int_to_string(den_);
    return s;
  }

  // Accepts "a" or "a/b".
  static Rational parse(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return from_parts(parse_int(text), 1);
    return from_parts(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }

 private:
  Int num_;
  Int den_;

  void normalize() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    Int g = gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  static Int gcd(Int a, Int b) {
    while (b != 0) {
      Int t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  static Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
  }
  static Int checked_sub(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
  }
  static Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
  }

  static std::string int_to_string(Int v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u > 0) {
      s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
      u /= 10;
    }
    return neg ? "-" + s : s;
  }

  static Int parse_int(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    std::size_t i = 0;
    bool neg = false;
    if (text[0] == '-' || text[0] == '+') {
      neg = text[0] == '-';
      i = 1;
    }
    if (i == text.size()) throw std::invalid_argument("bad rational literal: " + text);
    Int v = 0;
    for (; i < text.size(); ++i) {
      if (text[i] < '0' || text[i] > '9') throw std::invalid_argument("bad rational literal: " + text);
      v = checked_add(checked_mul(v, 10), text[i] - '0');
    }
    return neg ? -v : v;
  }
};

}  // namespace concavepd
