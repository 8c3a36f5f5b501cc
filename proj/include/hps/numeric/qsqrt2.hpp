#pragma once

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hps {

class DivisionByZero : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exact element rat + sqrt2 * sqrt(2) of the quadratic field Q(sqrt 2).
///
/// Both coordinates are canonical GMP rationals, so structural equality is
/// value equality. Ordering is exact; no floating point is involved.
class QSqrt2 {
 public:
  QSqrt2() = default;
  QSqrt2(long v) : rat_(v) {}  // NOLINT(google-explicit-constructor)
  QSqrt2(const mpz_class& v) : rat_(v) {}  // NOLINT(google-explicit-constructor)
  QSqrt2(const mpq_class& v) : rat_(v) { rat_.canonicalize(); }  // NOLINT(google-explicit-constructor)
  /// Unevaluated GMP integer expressions such as `n + 1`.
  template <class T>
  QSqrt2(const __gmp_expr<mpz_t, T>& v) : rat_(mpz_class(v)) {}  // NOLINT(google-explicit-constructor)
  template <class T>
  QSqrt2(const __gmp_expr<mpq_t, T>& v) : rat_(mpq_class(v)) { rat_.canonicalize(); }  // NOLINT(google-explicit-constructor)
  QSqrt2(mpq_class rat, mpq_class sqrt2);

  static QSqrt2 sqrt2() { return {mpq_class(0), mpq_class(1)}; }
  /// Rational from "p", "p/q" or a finite decimal "d.ddd"; throws std::invalid_argument.
  static mpq_class parse_rational(std::string_view text);

  const mpq_class& rat() const { return rat_; }
  const mpq_class& sqrt2_part() const { return sqrt2_; }

  bool is_zero() const { return sgn(rat_) == 0 && sgn(sqrt2_) == 0; }
  bool is_rational() const { return sgn(sqrt2_) == 0; }
  bool is_integer() const { return is_rational() && rat_.get_den() == 1; }

  int sign() const;
  QSqrt2 conjugate() const { return {rat_, -sqrt2_}; }
  /// Field norm x * conj(x) = rat^2 - 2 sqrt2^2.
  mpq_class norm() const { return rat_ * rat_ - 2 * sqrt2_ * sqrt2_; }
  QSqrt2 inverse() const;
  QSqrt2 pow(long exponent) const;
  /// Exact floor of the real value.
  mpz_class floor() const;

  QSqrt2& operator+=(const QSqrt2& o);
  QSqrt2& operator-=(const QSqrt2& o);
  QSqrt2& operator*=(const QSqrt2& o);
  QSqrt2& operator/=(const QSqrt2& o);

  friend QSqrt2 operator+(QSqrt2 a, const QSqrt2& b) { return a += b; }
  friend QSqrt2 operator-(QSqrt2 a, const QSqrt2& b) { return a -= b; }
  friend QSqrt2 operator*(QSqrt2 a, const QSqrt2& b) { return a *= b; }
  friend QSqrt2 operator/(QSqrt2 a, const QSqrt2& b) { return a /= b; }
  QSqrt2 operator-() const { return {-rat_, -sqrt2_}; }

  friend bool operator==(const QSqrt2& a, const QSqrt2& b) {
    return a.rat_ == b.rat_ && a.sqrt2_ == b.sqrt2_;
  }
  friend std::strong_ordering operator<=>(const QSqrt2& a, const QSqrt2& b);

  /// Human-readable form, e.g. "2/7 - 1/14*sqrt2".
  std::string to_string() const;
  double to_double() const;

 private:
  mpq_class rat_{0};
  mpq_class sqrt2_{0};
};

inline std::ostream& operator<<(std::ostream& os, const QSqrt2& x) { return os << x.to_string(); }

inline QSqrt2 abs(const QSqrt2& x) { return x.sign() < 0 ? -x : x; }
inline const QSqrt2& max(const QSqrt2& a, const QSqrt2& b) { return a < b ? b : a; }
inline const QSqrt2& min(const QSqrt2& a, const QSqrt2& b) { return b < a ? b : a; }

/// x^d for rational d >= 0 when the result stays in Q(sqrt 2); nullopt otherwise.
std::optional<QSqrt2> exact_pow(const QSqrt2& x, const mpq_class& d);

}  // namespace hps
