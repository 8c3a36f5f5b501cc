#pragma once

#include <optional>

#include "hps/numeric/interval.hpp"
#include "hps/numeric/qsqrt2.hpp"

namespace hps {

/// A real number known either exactly (in Q(sqrt 2)) or only by an enclosure.
///
/// The enclosure is always populated; the exact value is kept for as long as
/// every operation that produced the number stayed inside the field.
class CertifiedReal {
 public:
  CertifiedReal() : enclosure_(Interval::point(0)) , exact_(QSqrt2{}) {}
  CertifiedReal(const QSqrt2& x, long prec = kDefaultPrecision)  // NOLINT(google-explicit-constructor)
      : enclosure_(Interval::from_exact(x, prec)), exact_(x) {}
  explicit CertifiedReal(Interval enclosure) : enclosure_(std::move(enclosure)) {}

  bool is_exact() const { return exact_.has_value(); }
  const std::optional<QSqrt2>& exact() const { return exact_; }
  const Interval& enclosure() const { return enclosure_; }
  double to_double() const { return is_exact() ? exact_->to_double() : enclosure_.mid_double(); }

  friend CertifiedReal operator+(const CertifiedReal& a, const CertifiedReal& b);
  friend CertifiedReal operator-(const CertifiedReal& a, const CertifiedReal& b);
  friend CertifiedReal operator*(const CertifiedReal& a, const CertifiedReal& b);
  friend CertifiedReal operator/(const CertifiedReal& a, const CertifiedReal& b);

  /// Certainly a < b (exact comparison when both are exact).
  friend bool certainly_less(const CertifiedReal& a, const CertifiedReal& b);
  /// Certainly a <= b.
  friend bool certainly_leq(const CertifiedReal& a, const CertifiedReal& b);
  /// a == b is not excluded.
  friend bool possibly_equal(const CertifiedReal& a, const CertifiedReal& b);

 private:
  Interval enclosure_;
  std::optional<QSqrt2> exact_;
};

/// x^d for x >= 0 and rational d > 0, exact when the value stays in Q(sqrt 2).
CertifiedReal pow(const CertifiedReal& x, const mpq_class& d);

}  // namespace hps
