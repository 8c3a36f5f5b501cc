#pragma once

#include <gmpxx.h>

#include <string>

#include "hps/numeric/bigfloat.hpp"
#include "hps/numeric/qsqrt2.hpp"

namespace hps {

inline constexpr long kDefaultPrecision = 128;

/// Closed interval [lo, hi] with outward-rounded MPFR endpoints.
///
/// Every operation rounds the lower endpoint down and the upper endpoint up,
/// so the true value of any expression evaluated in this type stays inside.
class Interval {
 public:
  explicit Interval(long prec = kDefaultPrecision) : lo_(prec), hi_(prec) {}
  Interval(BigFloat lo, BigFloat hi);

  static Interval point(long v, long prec = kDefaultPrecision);
  static Interval from_rational(const mpq_class& q, long prec = kDefaultPrecision);
  static Interval from_exact(const QSqrt2& x, long prec = kDefaultPrecision);
  static Interval sqrt2(long prec = kDefaultPrecision);
  static Interval ln2(long prec = kDefaultPrecision);

  const BigFloat& lo() const { return lo_; }
  const BigFloat& hi() const { return hi_; }
  long precision() const { return static_cast<long>(lo_.precision()); }

  bool contains(const Interval& o) const;
  bool contains_rational(const mpq_class& q) const;
  bool overlaps(const Interval& o) const;
  bool contains_zero() const;
  bool positive() const { return lo_.sign() > 0; }
  bool negative() const { return hi_.sign() < 0; }
  /// Certainly below / above the other interval (disjoint).
  bool certainly_less(const Interval& o) const;

  BigFloat width() const;
  BigFloat mid() const;
  double mid_double() const;

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  /// Throws DivisionByZero when b straddles zero.
  friend Interval operator/(const Interval& a, const Interval& b);
  Interval operator-() const;

  /// Hull of both intervals.
  Interval hull(const Interval& o) const;

  std::string to_string(int digits = 20) const;

 private:
  BigFloat lo_;
  BigFloat hi_;
};

/// Natural logarithm. Requires lo > 0; throws std::domain_error otherwise.
Interval log(const Interval& x);
/// x^d for x >= 0 and rational d > 0, via exact-rounded v-th root and u-th power.
Interval pow(const Interval& x, const mpq_class& d);

/// Floating value with a certified absolute error bound.
struct ApproxScalar {
  BigFloat value;
  BigFloat error_bound;

  bool contains(const Interval& x) const;
  Interval as_interval() const;
  double to_double() const { return value.to_double(); }
};

/// Collapse an interval to midpoint-plus-radius form at `prec` bits.
ApproxScalar to_approx(const Interval& x, long prec);

/// |value - x| <= error_bound <= 2^(1-prec) |x|. prec must be >= 16.
ApproxScalar to_approx(const QSqrt2& x, long prec = kDefaultPrecision);
/// Certified natural logarithm of x > 0; throws std::domain_error otherwise.
ApproxScalar log_approx(const QSqrt2& x, long prec = kDefaultPrecision);
/// Certified base-2 logarithm.
ApproxScalar log2_approx(const QSqrt2& x, long prec = kDefaultPrecision);

/// Interval for log(x) tight to roughly `prec` bits (precision escalates internally).
Interval log_interval(const QSqrt2& x, long prec = kDefaultPrecision);

}  // namespace hps
