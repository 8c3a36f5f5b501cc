#include "hps/numeric/certified.hpp"

namespace hps {

CertifiedReal operator+(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact())
    return CertifiedReal(*a.exact_ + *b.exact_, std::max(a.enclosure_.precision(), b.enclosure_.precision()));
  return CertifiedReal(a.enclosure_ + b.enclosure_);
}

CertifiedReal operator-(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact())
    return CertifiedReal(*a.exact_ - *b.exact_, std::max(a.enclosure_.precision(), b.enclosure_.precision()));
  return CertifiedReal(a.enclosure_ - b.enclosure_);
}

CertifiedReal operator*(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact())
    return CertifiedReal(*a.exact_ * *b.exact_, std::max(a.enclosure_.precision(), b.enclosure_.precision()));
  return CertifiedReal(a.enclosure_ * b.enclosure_);
}

CertifiedReal operator/(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact())
    return CertifiedReal(*a.exact_ / *b.exact_, std::max(a.enclosure_.precision(), b.enclosure_.precision()));
  return CertifiedReal(a.enclosure_ / b.enclosure_);
}

// Exact values carry outward enclosures, so disjoint enclosures settle the order
// without touching the big rationals.
bool certainly_less(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact()) {
    if (compare(a.enclosure_.hi(), b.enclosure_.lo()) < 0) return true;
    if (compare(b.enclosure_.hi(), a.enclosure_.lo()) < 0) return false;
    return *a.exact_ < *b.exact_;
  }
  return a.enclosure_.certainly_less(b.enclosure_);
}

bool certainly_leq(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact()) {
    if (compare(a.enclosure_.hi(), b.enclosure_.lo()) < 0) return true;
    if (compare(b.enclosure_.hi(), a.enclosure_.lo()) < 0) return false;
    return *a.exact_ <= *b.exact_;
  }
  return compare(a.enclosure_.hi(), b.enclosure_.lo()) <= 0;
}

bool possibly_equal(const CertifiedReal& a, const CertifiedReal& b) {
  if (a.is_exact() && b.is_exact()) return *a.exact_ == *b.exact_;
  return a.enclosure_.overlaps(b.enclosure_);
}

CertifiedReal pow(const CertifiedReal& x, const mpq_class& d) {
  if (x.is_exact()) {
    if (auto e = exact_pow(*x.exact(), d)) return CertifiedReal(*e, x.enclosure().precision());
  }
  return CertifiedReal(pow(x.enclosure(), d));
}

}  // namespace hps
