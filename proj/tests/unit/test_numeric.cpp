#include <gtest/gtest.h>

#include <random>

#include "hps/numeric/certified.hpp"
#include "hps/numeric/interval.hpp"
#include "hps/numeric/qsqrt2.hpp"

using hps::ApproxScalar;
using hps::Interval;
using hps::QSqrt2;

namespace {

const QSqrt2 kRoot2 = QSqrt2::sqrt2();

QSqrt2 q(long p, long r = 1) { return QSqrt2(mpq_class(p, r)); }
QSqrt2 qs(long a, long b, long c, long d) { return QSqrt2(mpq_class(a, b), mpq_class(c, d)); }

// Exact rational enclosure of an ApproxScalar.
void approx_bounds(const ApproxScalar& a, mpq_class& lo, mpq_class& hi) {
  mpf_class v(0, mpfr_get_prec(a.value.get()) + 8);
  mpf_class e(0, mpfr_get_prec(a.error_bound.get()) + 8);
  mpfr_get_f(v.get_mpf_t(), a.value.get(), MPFR_RNDN);
  mpfr_get_f(e.get_mpf_t(), a.error_bound.get(), MPFR_RNDU);
  lo = mpq_class(v) - mpq_class(e);
  hi = mpq_class(v) + mpq_class(e);
}

// Decimal string "d.ddd" with `digits` fractional digits as an exact rational.
mpq_class decimal(const std::string& s) { return QSqrt2::parse_rational(s); }

QSqrt2 random_element(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-50, 50);
  std::uniform_int_distribution<long> den(1, 30);
  return qs(num(rng), den(rng), num(rng), den(rng));
}

}  // namespace

TEST(QSqrt2, DivisionByConjugate) {
  EXPECT_EQ(q(1) / (q(1) + kRoot2), q(-1) + kRoot2);
  QSqrt2 inv = q(1) / (q(4) + kRoot2);
  EXPECT_EQ(inv, qs(2, 7, -1, 14));
  // Independent check with plain rationals: (a + b r)(4 + r) = (4a + 2b) + (a + 4b) r.
  mpq_class a = inv.rat(), b = inv.sqrt2_part();
  EXPECT_EQ(4 * a + 2 * b, 1);
  EXPECT_EQ(a + 4 * b, 0);
}

TEST(QSqrt2, RationalDenominatorAtLevelTwo) {
  QSqrt2 c2 = q(1) / (q(8) + q(2) * kRoot2.pow(2));
  EXPECT_TRUE(c2.is_rational());
  EXPECT_EQ(c2 * q(12), q(1));
}

TEST(QSqrt2, DivisionByZeroThrows) { EXPECT_THROW(q(1) / q(0), hps::DivisionByZero); }

TEST(QSqrt2, Ordering) {
  EXPECT_LT(q(1), kRoot2);
  EXPECT_LT(q(7), q(5) * kRoot2);
  EXPECT_GT(q(3) * kRoot2, q(4));  // 18 > 16
  QSqrt2 x = qs(3, 7, -2, 9);
  EXPECT_EQ(x <=> x, std::strong_ordering::equal);
  EXPECT_EQ((q(3) - q(2) * kRoot2).sign(), 1);   // 9 > 8
  EXPECT_EQ((q(-3) + q(2) * kRoot2).sign(), -1);
}

TEST(QSqrt2, CanonicalForm) {
  QSqrt2 x(mpq_class(6, 4), mpq_class(-10, 20));
  EXPECT_EQ(x.rat().get_num(), 3);
  EXPECT_EQ(x.rat().get_den(), 2);
  EXPECT_EQ(x.sqrt2_part().get_num(), -1);
  EXPECT_EQ(x.sqrt2_part().get_den(), 2);
}

TEST(QSqrt2, Floor) {
  EXPECT_EQ(kRoot2.floor(), 1);
  EXPECT_EQ((-kRoot2).floor(), -2);
  EXPECT_EQ(q(7, 2).floor(), 3);
  EXPECT_EQ(q(-7, 2).floor(), -4);
  EXPECT_EQ(q(5).floor(), 5);
  EXPECT_EQ((q(100) * kRoot2).floor(), 141);
}

TEST(QSqrt2, ParseRational) {
  EXPECT_EQ(QSqrt2::parse_rational("3/9"), mpq_class(1, 3));
  EXPECT_EQ(QSqrt2::parse_rational("-0.25"), mpq_class(-1, 4));
  EXPECT_EQ(QSqrt2::parse_rational("7"), mpq_class(7));
  EXPECT_THROW(QSqrt2::parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(QSqrt2::parse_rational("abc"), std::invalid_argument);
}

TEST(QSqrt2, FieldAxiomsOnRandomSamples) {
  std::mt19937_64 rng(12345);
  for (int i = 0; i < 2000; ++i) {
    QSqrt2 x = random_element(rng), y = random_element(rng), z = random_element(rng);
    EXPECT_EQ((x + y) + z, x + (y + z));
    EXPECT_EQ(x * (y + z), x * y + x * z);
    EXPECT_EQ((x * y) * z, x * (y * z));
    if (!x.is_zero()) EXPECT_EQ(x * (q(1) / x), q(1));
  }
}

TEST(QSqrt2, CompareAgreesWithDisjointApproximations) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    QSqrt2 x = random_element(rng), y = random_element(rng);
    Interval ix = Interval::from_exact(x, 64), iy = Interval::from_exact(y, 64);
    if (ix.certainly_less(iy)) EXPECT_LT(x, y);
    if (iy.certainly_less(ix)) EXPECT_LT(y, x);
  }
}

TEST(QSqrt2, ExactPow) {
  auto r = hps::exact_pow(q(1, 4), mpq_class(1, 2));
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, q(1, 2));
  r = hps::exact_pow(q(1, 2), mpq_class(1, 2));
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, qs(0, 1, 1, 2));  // sqrt(1/2) = sqrt2/2
  r = hps::exact_pow(q(1, 3), mpq_class(2));
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, q(1, 9));
  EXPECT_FALSE(hps::exact_pow(q(1, 3), mpq_class(1, 2)));
  EXPECT_FALSE(hps::exact_pow(q(2), mpq_class(1, 3)));
}

TEST(Approx, HalfIsExact) {
  ApproxScalar a = hps::to_approx(q(1, 2), 64);
  EXPECT_EQ(a.value.to_double(), 0.5);
  EXPECT_TRUE(a.error_bound.is_zero());
}

TEST(Approx, Sqrt2AgainstIntegerSquareRoot) {
  // floor(sqrt(2 * 4^40)) = floor(sqrt2 * 2^40).
  mpz_class big = mpz_class(2) << 80;
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), big.get_mpz_t());
  mpq_class lo(root, mpz_class(1) << 40), hi(root + 1, mpz_class(1) << 40);
  for (long prec : {16L, 64L, 128L, 256L}) {
    ApproxScalar a = hps::to_approx(kRoot2, prec);
    mpq_class alo, ahi;
    approx_bounds(a, alo, ahi);
    EXPECT_LE(alo, hi);
    EXPECT_GE(ahi, lo);
    // Bound tightness: error_bound <= 2^(1-prec) * sqrt2.
    mpq_class eb = (ahi - alo) / 2;
    EXPECT_LE(eb, mpq_class(hi) * mpq_class(mpz_class(2), mpz_class(1) << prec));
  }
}

TEST(Approx, ExampleRatioAgainstIntegerSquareRoot) {
  QSqrt2 x = (q(4) - kRoot2) / q(14);
  mpz_class big = mpz_class(2) << 200;
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), big.get_mpz_t());
  mpq_class r_lo(root, mpz_class(1) << 100), r_hi(root + 1, mpz_class(1) << 100);
  mpq_class lo = (4 - r_hi) / 14, hi = (4 - r_lo) / 14;
  ApproxScalar a = hps::to_approx(x, 64);
  mpq_class alo, ahi;
  approx_bounds(a, alo, ahi);
  EXPECT_LE(alo, hi);
  EXPECT_GE(ahi, lo);
  EXPECT_NEAR(a.to_double(), 0.18469903125906463937, 1e-17);
}

TEST(Approx, LogOneIsZero) {
  ApproxScalar a = hps::log_approx(q(1), 64);
  EXPECT_TRUE(a.value.is_zero());
  EXPECT_TRUE(a.error_bound.is_zero());
}

TEST(Approx, LogThirdAgainstTabulatedLn3) {
  const mpq_class ln3 = decimal("1.09861228866810969139524523692252570464749055782274945173469");
  const mpq_class slack(1, mpz_class("1" + std::string(58, '0'), 10));
  for (long prec : {64L, 128L, 160L}) {
    ApproxScalar a = hps::log_approx(q(1, 3), prec);
    mpq_class lo, hi;
    approx_bounds(a, lo, hi);
    EXPECT_LE(lo, -ln3 + slack);
    EXPECT_GE(hi, -ln3 - slack);
    EXPECT_LT(hi - lo, mpq_class(mpz_class(1), mpz_class(1) << (prec - 4)));
  }
}

TEST(Approx, LogFourPlusRoot2AgainstTabulatedValue) {
  const mpq_class v = decimal("1.68902763673349862149096505979024478939389437772534279197139");
  const mpq_class slack(1, mpz_class("1" + std::string(58, '0'), 10));
  for (long prec : {64L, 128L, 160L}) {
    ApproxScalar a = hps::log_approx(q(4) + kRoot2, prec);
    mpq_class lo, hi;
    approx_bounds(a, lo, hi);
    EXPECT_LE(lo, v + slack);
    EXPECT_GE(hi, v - slack);
  }
}

TEST(Approx, LogRejectsNonPositive) {
  EXPECT_THROW(hps::log_approx(q(0), 64), std::domain_error);
  EXPECT_THROW(hps::log_approx(q(1) - kRoot2, 64), std::domain_error);
}

TEST(Approx, Log2RatioMatchesTabulatedConstant) {
  const mpq_class v = decimal("0.630929753571457437099527114342760854299585640131880427870655");
  const mpq_class slack(1, mpz_class("1" + std::string(58, '0'), 10));
  Interval r = hps::log_interval(q(2), 192) / hps::log_interval(q(3), 192);
  EXPECT_TRUE(r.overlaps(Interval(Interval::from_rational(v - slack, 256).lo(), Interval::from_rational(v + slack, 256).hi())));
  EXPECT_LT(r.width().to_double(), 1e-50);
}

TEST(Interval, SoundnessOnCompositeExpressions) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    QSqrt2 x = random_element(rng), y = random_element(rng), z = random_element(rng);
    if (z.is_zero()) continue;
    QSqrt2 exact = (x * y - z) / z + x * x;
    Interval ix = Interval::from_exact(x, 80), iy = Interval::from_exact(y, 80), iz = Interval::from_exact(z, 80);
    Interval approx = (ix * iy - iz) / iz + ix * ix;
    Interval point = Interval::from_exact(exact, 200);
    EXPECT_TRUE(approx.overlaps(point));
    if (exact.is_rational()) EXPECT_TRUE(approx.contains_rational(exact.rat()));
  }
}

TEST(Interval, PowEnclosesExactRoots) {
  Interval r = hps::pow(Interval::from_rational(mpq_class(1, 4)), mpq_class(1, 2));
  EXPECT_TRUE(r.contains_rational(mpq_class(1, 2)));
  Interval s = hps::pow(Interval::from_rational(mpq_class(3)), mpq_class(999, 1000));
  EXPECT_NEAR(s.mid_double(), 2.99670597289463446, 1e-15);
}

TEST(Certified, KeepsExactValues) {
  hps::CertifiedReal a(q(1, 4)), b(kRoot2);
  hps::CertifiedReal c = a * b + a;
  ASSERT_TRUE(c.is_exact());
  EXPECT_EQ(*c.exact(), q(1, 4) * kRoot2 + q(1, 4));
  hps::CertifiedReal p = hps::pow(a, mpq_class(1, 2));
  ASSERT_TRUE(p.is_exact());
  EXPECT_EQ(*p.exact(), q(1, 2));
  hps::CertifiedReal t = hps::pow(hps::CertifiedReal(q(1, 3)), mpq_class(1, 2));
  EXPECT_FALSE(t.is_exact());
  EXPECT_TRUE(certainly_less(t, hps::CertifiedReal(q(3, 5))));
  EXPECT_TRUE(certainly_less(hps::CertifiedReal(q(57, 100)), t));
}
