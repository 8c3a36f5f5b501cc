#include "hps/numeric/qsqrt2.hpp"

#include <mpfr.h>

#include <cctype>
#include <sstream>

namespace hps {

QSqrt2::QSqrt2(mpq_class rat, mpq_class sqrt2) : rat_(std::move(rat)), sqrt2_(std::move(sqrt2)) {
  rat_.canonicalize();
  sqrt2_.canonicalize();
}

mpq_class QSqrt2::parse_rational(std::string_view text) {
  std::string s(text);
  auto trim = [](std::string& t) {
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  };
  trim(s);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  bool negative = false;
  std::string body = s;
  if (body[0] == '-' || body[0] == '+') {
    negative = body[0] == '-';
    body.erase(body.begin());
  }
  auto all_digits = [](const std::string& t) {
    if (t.empty()) return false;
    for (char ch : t)
      if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
  };
  mpq_class out;
  if (auto slash = body.find('/'); slash != std::string::npos) {
    std::string num = body.substr(0, slash);
    std::string den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw std::invalid_argument("bad rational literal: " + s);
    mpz_class d(den, 10);
    if (d == 0) throw std::invalid_argument("zero denominator: " + s);
    out = mpq_class(mpz_class(num, 10), d);
  } else if (auto dot = body.find('.'); dot != std::string::npos) {
    std::string ip = body.substr(0, dot);
    std::string fp = body.substr(dot + 1);
    if (ip.empty()) ip = "0";
    if (!all_digits(ip) || (!fp.empty() && !all_digits(fp))) throw std::invalid_argument("bad decimal literal: " + s);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    out = mpq_class(mpz_class(ip + fp, 10), scale);
  } else {
    if (!all_digits(body)) throw std::invalid_argument("bad rational literal: " + s);
    out = mpq_class(mpz_class(body, 10));
  }
  out.canonicalize();
  return negative ? mpq_class(-out) : out;
}

int QSqrt2::sign() const {
  int sa = sgn(rat_);
  int sb = sgn(sqrt2_);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // Opposite signs: |rat| vs |sqrt2| * sqrt(2), decided by squares.
  mpq_class lhs = rat_ * rat_;
  mpq_class rhs = 2 * sqrt2_ * sqrt2_;
  return lhs > rhs ? sa : sb;
}

QSqrt2 QSqrt2::inverse() const {
  if (is_zero()) throw DivisionByZero("division by zero in Q(sqrt2)");
  mpq_class n = norm();
  return {rat_ / n, -sqrt2_ / n};
}

QSqrt2 QSqrt2::pow(long exponent) const {
  if (exponent < 0) return inverse().pow(-exponent);
  QSqrt2 result(1);
  QSqrt2 base = *this;
  unsigned long e = static_cast<unsigned long>(exponent);
  while (e != 0) {
    if (e & 1UL) result *= base;
    e >>= 1;
    if (e != 0) base *= base;
  }
  return result;
}

mpz_class QSqrt2::floor() const {
  if (is_rational()) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), rat_.get_num_mpz_t(), rat_.get_den_mpz_t());
    return q;
  }
  // Approximate then repair with exact comparisons.
  mpfr_t a, b;
  mpfr_init2(a, 256);
  mpfr_init2(b, 256);
  mpfr_sqrt_ui(a, 2, MPFR_RNDN);
  mpfr_mul_q(a, a, sqrt2_.get_mpq_t(), MPFR_RNDN);
  mpfr_set_q(b, rat_.get_mpq_t(), MPFR_RNDN);
  mpfr_add(a, a, b, MPFR_RNDN);
  mpfr_floor(a, a);
  mpz_class n;
  mpfr_get_z(n.get_mpz_t(), a, MPFR_RNDN);
  mpfr_clear(a);
  mpfr_clear(b);
  while (QSqrt2(n) > *this) --n;
  while (QSqrt2(n + 1) <= *this) ++n;
  return n;
}

QSqrt2& QSqrt2::operator+=(const QSqrt2& o) {
  rat_ += o.rat_;
  sqrt2_ += o.sqrt2_;
  return *this;
}

QSqrt2& QSqrt2::operator-=(const QSqrt2& o) {
  rat_ -= o.rat_;
  sqrt2_ -= o.sqrt2_;
  return *this;
}

QSqrt2& QSqrt2::operator*=(const QSqrt2& o) {
  if (is_rational() && o.is_rational()) {
    rat_ *= o.rat_;
    return *this;
  }
  mpq_class r = rat_ * o.rat_ + 2 * sqrt2_ * o.sqrt2_;
  mpq_class s = rat_ * o.sqrt2_ + sqrt2_ * o.rat_;
  rat_ = std::move(r);
  sqrt2_ = std::move(s);
  return *this;
}

QSqrt2& QSqrt2::operator/=(const QSqrt2& o) {
  if (o.is_zero()) throw DivisionByZero("division by zero in Q(sqrt2)");
  if (o.is_rational()) {
    rat_ /= o.rat_;
    sqrt2_ /= o.rat_;
    return *this;
  }
  return *this *= o.inverse();
}

std::strong_ordering operator<=>(const QSqrt2& a, const QSqrt2& b) {
  int s = (a - b).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string QSqrt2::to_string() const {
  if (is_rational()) return rat_.get_str();
  std::ostringstream os;
  if (sgn(rat_) != 0) {
    os << rat_.get_str();
    os << (sgn(sqrt2_) < 0 ? " - " : " + ");
    mpq_class mag = abs(sqrt2_);
    os << mag.get_str() << "*sqrt2";
  } else {
    os << sqrt2_.get_str() << "*sqrt2";
  }
  return os.str();
}

double QSqrt2::to_double() const {
  mpfr_t a, b;
  mpfr_init2(a, 128);
  mpfr_init2(b, 128);
  mpfr_sqrt_ui(a, 2, MPFR_RNDN);
  mpfr_mul_q(a, a, sqrt2_.get_mpq_t(), MPFR_RNDN);
  mpfr_set_q(b, rat_.get_mpq_t(), MPFR_RNDN);
  mpfr_add(a, a, b, MPFR_RNDN);
  double d = mpfr_get_d(a, MPFR_RNDN);
  mpfr_clear(a);
  mpfr_clear(b);
  return d;
}

namespace {

std::optional<mpz_class> exact_root(const mpz_class& v, unsigned long n) {
  if (sgn(v) < 0) return std::nullopt;
  mpz_class r;
  if (mpz_root(r.get_mpz_t(), v.get_mpz_t(), n) == 0) return std::nullopt;
  return r;
}

std::optional<mpq_class> exact_root(const mpq_class& v, unsigned long n) {
  auto num = exact_root(v.get_num(), n);
  auto den = exact_root(v.get_den(), n);
  if (!num || !den) return std::nullopt;
  mpq_class out(*num, *den);
  out.canonicalize();
  return out;
}

}  // namespace

std::optional<QSqrt2> exact_pow(const QSqrt2& x, const mpq_class& d) {
  if (sgn(d) < 0) return std::nullopt;
  if (d.get_den() == 1) {
    if (!d.get_num().fits_slong_p()) return std::nullopt;
    return x.pow(d.get_num().get_si());
  }
  if (!x.is_rational() || x.sign() < 0) return std::nullopt;
  if (!d.get_den().fits_ulong_p() || !d.get_num().fits_slong_p()) return std::nullopt;
  const unsigned long v = d.get_den().get_ui();
  const long u = d.get_num().get_si();
  if (auto r = exact_root(x.rat(), v)) return QSqrt2(*r).pow(u);
  if (v % 2 == 0) {
    // Root of the form s*sqrt2 with (s*sqrt2)^v = s^v * 2^(v/2).
    mpz_class two_pow;
    mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, v / 2);
    mpq_class reduced = x.rat() / mpq_class(two_pow);
    if (auto s = exact_root(reduced, v)) return QSqrt2(mpq_class(0), *s).pow(u);
  }
  return std::nullopt;
}

}  // namespace hps
