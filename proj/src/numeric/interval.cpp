#include "hps/numeric/interval.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hps {

std::string BigFloat::to_decimal(int digits) const {
  if (mpfr_zero_p(v_)) return "0";
  if (!mpfr_number_p(v_)) return mpfr_nan_p(v_) ? "nan" : (mpfr_sgn(v_) > 0 ? "inf" : "-inf");
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
  return std::string(buf.data());
}

namespace {

long max_prec(const Interval& a, const Interval& b) { return std::max(a.precision(), b.precision()); }

void set_min(BigFloat& out, std::initializer_list<const BigFloat*> xs) {
  const BigFloat* best = *xs.begin();
  for (const BigFloat* x : xs)
    if (compare(*x, *best) < 0) best = x;
  mpfr_set(out.get(), best->get(), MPFR_RNDD);
}

void set_max(BigFloat& out, std::initializer_list<const BigFloat*> xs) {
  const BigFloat* best = *xs.begin();
  for (const BigFloat* x : xs)
    if (compare(*x, *best) > 0) best = x;
  mpfr_set(out.get(), best->get(), MPFR_RNDU);
}

}  // namespace

Interval::Interval(BigFloat lo, BigFloat hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (compare(lo_, hi_) > 0) throw std::logic_error("interval with lo > hi");
}

Interval Interval::point(long v, long prec) {
  Interval r(prec);
  mpfr_set_si(r.lo_.get(), v, MPFR_RNDD);
  mpfr_set_si(r.hi_.get(), v, MPFR_RNDU);
  return r;
}

Interval Interval::from_rational(const mpq_class& q, long prec) {
  Interval r(prec);
  mpfr_set_q(r.lo_.get(), q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_.get(), q.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::sqrt2(long prec) {
  Interval r(prec);
  mpfr_sqrt_ui(r.lo_.get(), 2, MPFR_RNDD);
  mpfr_sqrt_ui(r.hi_.get(), 2, MPFR_RNDU);
  return r;
}

Interval Interval::from_exact(const QSqrt2& x, long prec) {
  if (x.is_rational()) return from_rational(x.rat(), prec);
  return from_rational(x.rat(), prec) + from_rational(x.sqrt2_part(), prec) * sqrt2(prec);
}

bool Interval::contains(const Interval& o) const {
  return compare(lo_, o.lo_) <= 0 && compare(o.hi_, hi_) <= 0;
}

bool Interval::contains_rational(const mpq_class& q) const {
  return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), q.get_mpq_t()) >= 0;
}

bool Interval::overlaps(const Interval& o) const {
  return compare(lo_, o.hi_) <= 0 && compare(o.lo_, hi_) <= 0;
}

bool Interval::contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }

bool Interval::certainly_less(const Interval& o) const { return compare(hi_, o.lo_) < 0; }

BigFloat Interval::width() const {
  BigFloat w(precision());
  mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
  return w;
}

BigFloat Interval::mid() const {
  BigFloat m(precision() + 1);
  mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
  mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
  return m;
}

double Interval::mid_double() const { return mid().to_double(); }

Interval operator+(const Interval& a, const Interval& b) {
  Interval r(max_prec(a, b));
  mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
  mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
  return r;
}

Interval operator-(const Interval& a, const Interval& b) {
  Interval r(max_prec(a, b));
  mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
  mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
  return r;
}

Interval Interval::operator-() const {
  Interval r(precision());
  mpfr_neg(r.lo_.get(), hi_.get(), MPFR_RNDD);
  mpfr_neg(r.hi_.get(), lo_.get(), MPFR_RNDU);
  return r;
}

Interval operator*(const Interval& a, const Interval& b) {
  const long p = max_prec(a, b);
  std::array<BigFloat, 4> dn{BigFloat(p), BigFloat(p), BigFloat(p), BigFloat(p)};
  std::array<BigFloat, 4> up{BigFloat(p), BigFloat(p), BigFloat(p), BigFloat(p)};
  const BigFloat* xs[2] = {&a.lo_, &a.hi_};
  const BigFloat* ys[2] = {&b.lo_, &b.hi_};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      mpfr_mul(dn[2 * i + j].get(), xs[i]->get(), ys[j]->get(), MPFR_RNDD);
      mpfr_mul(up[2 * i + j].get(), xs[i]->get(), ys[j]->get(), MPFR_RNDU);
    }
  Interval r(p);
  set_min(r.lo_, {&dn[0], &dn[1], &dn[2], &dn[3]});
  set_max(r.hi_, {&up[0], &up[1], &up[2], &up[3]});
  return r;
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw DivisionByZero("interval division by an interval containing zero");
  const long p = max_prec(a, b);
  std::array<BigFloat, 4> dn{BigFloat(p), BigFloat(p), BigFloat(p), BigFloat(p)};
  std::array<BigFloat, 4> up{BigFloat(p), BigFloat(p), BigFloat(p), BigFloat(p)};
  const BigFloat* xs[2] = {&a.lo_, &a.hi_};
  const BigFloat* ys[2] = {&b.lo_, &b.hi_};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      mpfr_div(dn[2 * i + j].get(), xs[i]->get(), ys[j]->get(), MPFR_RNDD);
      mpfr_div(up[2 * i + j].get(), xs[i]->get(), ys[j]->get(), MPFR_RNDU);
    }
  Interval r(p);
  set_min(r.lo_, {&dn[0], &dn[1], &dn[2], &dn[3]});
  set_max(r.hi_, {&up[0], &up[1], &up[2], &up[3]});
  return r;
}

Interval Interval::hull(const Interval& o) const {
  Interval r(std::max(precision(), o.precision()));
  mpfr_min(r.lo_.get(), lo_.get(), o.lo_.get(), MPFR_RNDD);
  mpfr_max(r.hi_.get(), hi_.get(), o.hi_.get(), MPFR_RNDU);
  return r;
}

std::string Interval::to_string(int digits) const {
  std::ostringstream os;
  os << '[' << lo_.to_decimal(digits) << ", " << hi_.to_decimal(digits) << ']';
  return os.str();
}

namespace {

// 2 * atanh(z) = log((1+z)/(1-z)) for an interval 0 <= z <= 1/3, with the
// truncated tail enclosed by [0, 2 z^(2N+1) / ((2N+1)(1-z^2))].
Interval two_atanh_series(const Interval& z, long prec) {
  const Interval z2 = z * z;
  Interval power = z;  // z^(2i+1)
  Interval sum = Interval::point(0, prec);
  long i = 0;
  BigFloat threshold(prec);
  mpfr_set_ui_2exp(threshold.get(), 1, -(prec + 4), MPFR_RNDD);
  for (;; ++i) {
    sum = sum + power / Interval::point(2 * i + 1, prec);
    power = power * z2;
    if (compare(power.hi(), threshold) < 0) break;
  }
  // power now holds z^(2(i+1)+1); tail bound uses N = i+1.
  const long n = i + 1;
  Interval one = Interval::point(1, prec);
  Interval tail_hi = power / (Interval::point(2 * n + 1, prec) * (one - z2));
  BigFloat zero(prec);
  Interval tail(zero, tail_hi.hi());
  return Interval::point(2, prec) * (sum + tail);
}

// Encloses log(v) for an exact positive MPFR value v.
Interval log_point(const BigFloat& v, long prec) {
  if (v.sign() <= 0) throw std::domain_error("log of nonpositive value");
  const long e = mpfr_get_exp(v.get());  // v = m 2^e, m in [1/2, 1)
  BigFloat y(v.precision());
  mpfr_mul_2si(y.get(), v.get(), 1 - e, MPFR_RNDN);  // exact: y in [1, 2)
  Interval yi(y, y);
  Interval one = Interval::point(1, prec);
  Interval z = (yi - one) / (yi + one);
  // Tighten an interval that dipped below zero purely through rounding.
  if (z.lo().sign() < 0) {
    BigFloat zero(prec);
    z = Interval(zero, z.hi().sign() < 0 ? zero : z.hi());
  }
  Interval log_y = two_atanh_series(z, prec);
  return log_y + Interval::point(e - 1, prec) * Interval::ln2(prec);
}

}  // namespace

Interval Interval::ln2(long prec) {
  static std::mutex mu;
  static std::map<long, Interval> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(prec); it != cache.end()) return it->second;
  }
  // log 2 = 2 atanh(1/3).
  Interval third = Interval::point(1, prec) / Interval::point(3, prec);
  Interval value = two_atanh_series(third, prec);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(prec, value);
  return value;
}

Interval log(const Interval& x) {
  if (!x.positive()) throw std::domain_error("log of an interval not bounded away from zero");
  const long prec = x.precision() + 16;
  Interval lo = log_point(x.lo(), prec);
  Interval hi = log_point(x.hi(), prec);
  return Interval(lo.lo(), hi.hi());
}

Interval pow(const Interval& x, const mpq_class& d) {
  if (x.lo().sign() < 0) throw std::domain_error("pow of negative interval");
  if (sgn(d) <= 0) throw std::domain_error("pow with nonpositive exponent");
  if (!d.get_den().fits_ulong_p() || !d.get_num().fits_ulong_p())
    throw std::domain_error("pow exponent too large");
  const unsigned long v = d.get_den().get_ui();
  const unsigned long u = d.get_num().get_ui();
  const long prec = x.precision();
  BigFloat lo(prec), hi(prec);
  mpfr_rootn_ui(lo.get(), x.lo().get(), v, MPFR_RNDD);
  mpfr_rootn_ui(hi.get(), x.hi().get(), v, MPFR_RNDU);
  mpfr_pow_ui(lo.get(), lo.get(), u, MPFR_RNDD);
  mpfr_pow_ui(hi.get(), hi.get(), u, MPFR_RNDU);
  return Interval(std::move(lo), std::move(hi));
}

bool ApproxScalar::contains(const Interval& x) const { return as_interval().contains(x); }

Interval ApproxScalar::as_interval() const {
  const long p = static_cast<long>(std::max(value.precision(), error_bound.precision())) + 2;
  BigFloat lo(p), hi(p);
  mpfr_sub(lo.get(), value.get(), error_bound.get(), MPFR_RNDD);
  mpfr_add(hi.get(), value.get(), error_bound.get(), MPFR_RNDU);
  return Interval(std::move(lo), std::move(hi));
}

ApproxScalar to_approx(const Interval& x, long prec) {
  ApproxScalar out{BigFloat(prec), BigFloat(prec)};
  BigFloat m = x.mid();
  mpfr_set(out.value.get(), m.get(), MPFR_RNDN);
  BigFloat a(prec), b(prec);
  mpfr_sub(a.get(), out.value.get(), x.lo().get(), MPFR_RNDU);
  mpfr_sub(b.get(), x.hi().get(), out.value.get(), MPFR_RNDU);
  mpfr_max(out.error_bound.get(), a.get(), b.get(), MPFR_RNDU);
  if (out.error_bound.sign() < 0) mpfr_set_zero(out.error_bound.get(), 1);
  return out;
}

namespace {

// True when width(x) <= 2^-(prec+2) * min|x|.
bool relatively_tight(const Interval& x, long prec) {
  if (x.contains_zero()) return false;
  BigFloat mag(x.precision());
  if (x.positive())
    mpfr_set(mag.get(), x.lo().get(), MPFR_RNDD);
  else
    mpfr_neg(mag.get(), x.hi().get(), MPFR_RNDD);
  mpfr_mul_2si(mag.get(), mag.get(), -(prec + 2), MPFR_RNDD);
  return compare(x.width(), mag) <= 0;
}

}  // namespace

ApproxScalar to_approx(const QSqrt2& x, long prec) {
  if (prec < 16) throw std::invalid_argument("precision must be at least 16 bits");
  ApproxScalar out{BigFloat(prec), BigFloat(prec)};
  if (x.is_zero()) return out;
  if (x.is_rational()) {
    int ternary = mpfr_set_q(out.value.get(), x.rat().get_mpq_t(), MPFR_RNDN);
    if (ternary != 0) {
      // Half an ulp of the rounded value.
      const long e = mpfr_get_exp(out.value.get());
      mpfr_set_ui_2exp(out.error_bound.get(), 1, e - prec - 1, MPFR_RNDU);
    }
    return out;
  }
  for (long work = prec + 32;; work *= 2) {
    Interval enc = Interval::from_exact(x, work);
    if (relatively_tight(enc, prec)) return to_approx(enc, prec);
  }
}

Interval log_interval(const QSqrt2& x, long prec) {
  if (x.sign() <= 0) throw std::domain_error("log of nonpositive value " + x.to_string());
  if (x == QSqrt2(1)) return Interval::point(0, prec);
  for (long work = prec + 32;; work *= 2) {
    Interval enc = Interval::from_exact(x, work);
    Interval l = log(enc);
    if (relatively_tight(l, prec) || work > 64 * prec) return l;
  }
}

ApproxScalar log_approx(const QSqrt2& x, long prec) {
  if (x.sign() <= 0) throw std::domain_error("log of nonpositive value " + x.to_string());
  if (x == QSqrt2(1)) return ApproxScalar{BigFloat(prec), BigFloat(prec)};
  return to_approx(log_interval(x, prec), prec);
}

ApproxScalar log2_approx(const QSqrt2& x, long prec) {
  if (x.sign() <= 0) throw std::domain_error("log of nonpositive value " + x.to_string());
  if (x == QSqrt2(1)) return ApproxScalar{BigFloat(prec), BigFloat(prec)};
  Interval l = log_interval(x, prec + 8);
  return to_approx(l / Interval::ln2(prec + 40), prec);
}

}  // namespace hps
