#include <gtest/gtest.h>
#include <algorithm>
#include <cmath>

#include "hps/analysis.hpp"
#include "specs.hpp"

using hps::QSqrt2;

namespace {

QSqrt2 q(long p, long r = 1) { return QSqrt2(mpq_class(p, r)); }

hps::RefinementLadder ladder_for(const hps::ConstructionSpec& spec, int k) {
  return hps::binary_refine(hps::star_transform(spec, k), k);
}

QSqrt2 root2_pow(int k) { return QSqrt2::sqrt2().pow(k); }

std::vector<hps::ConstructionSpec> property_specs() {
  return {hps::builtin_uniform(2, mpq_class(1, 3)), hps::builtin_uniform(7, mpq_class(1, 10)),
          hps::builtin_middle_alpha(mpq_class(1, 5)), hps::builtin_example5(), hps::builtin_remark_example(),
          hps::testing::irregular_spec(), hps::testing::edged_spec()};
}

int property_depth(const hps::ConstructionSpec& spec) {
  if (spec.name() == "irregular") return 6;
  if (spec.name() == "example5" || spec.name() == "remark_example") return 9;
  return 10;
}

}  // namespace

TEST(Stats, MiddleThirdsIsConstant) {
  auto ladder = ladder_for(hps::builtin_uniform(2, mpq_class(1, 3)), 10);
  auto st = hps::stats(ladder);
  ASSERT_EQ(st.top(), 10);
  for (int m = 0; m <= 10; ++m) {
    const auto& lv = st.at(m);
    if (m < 10) {
      EXPECT_EQ(*lv.beta, q(1, 3)) << m;
      EXPECT_EQ(*lv.Gamma, q(2, 3)) << m;
    } else {
      EXPECT_FALSE(lv.beta.has_value());
    }
    if (m > 0) {
      EXPECT_EQ(*lv.gamma, q(1, 3)) << m;
      EXPECT_EQ(*lv.Lambda, q(1, 3));
      EXPECT_EQ(*lv.lambda, q(1, 3));
    } else {
      EXPECT_FALSE(lv.gamma.has_value());
    }
    EXPECT_EQ(lv.count, mpz_class(1) << m);
  }
}

TEST(Stats, Example5BetaBoundOffSpecialLevel) {
  auto ladder = ladder_for(hps::builtin_example5(), 10);
  auto st = hps::stats(ladder);
  for (int k = 1; k <= 10; ++k) {
    const int special = ladder.m_k(k - 1) + k / 2;
    for (int j = ladder.m_k(k - 1); j < ladder.m_k(k); ++j) {
      if (j == special) continue;
      const QSqrt2 bound = q(1) / QSqrt2(mpz_class(mpz_class(1) << (ladder.m_k(k) - j)));
      EXPECT_LE(*st.at(j).beta, bound) << "k=" << k << " j=" << j;
    }
  }
}

TEST(Stats, Example5SpecialLevelSurvivingMass) {
  auto ladder = ladder_for(hps::builtin_example5(), 10);
  auto st = hps::stats(ladder);
  for (int k = 1; k <= 10; ++k) {
    const int h = k / 2;
    const int j = ladder.m_k(k - 1) + h;
    const QSqrt2 bound = (QSqrt2(2) - QSqrt2::sqrt2()) / QSqrt2(4 + k);
    EXPECT_GE(*st.at(j).Gamma, bound) << k;
    // The block holding the special gap loses exactly that gap.
    const QSqrt2 d = ladder.star().delta(k);
    const QSqrt2 top_len = QSqrt2(mpz_class(mpz_class(1) << (k - h + 1))) * d + QSqrt2(k) * root2_pow(k) * d;
    const QSqrt2 expected = (top_len - (QSqrt2(2) + QSqrt2(k) * root2_pow(k)) * d) / top_len;
    EXPECT_EQ(*st.at(j).Gamma, expected) << k;
  }
}

TEST(Stats, Example5SmallGammaTail) {
  auto ladder = ladder_for(hps::builtin_example5(), 10);
  auto st = hps::stats(ladder);
  for (int k = 2; k <= 10; ++k)
    for (int j = ladder.m_k(k - 1) + k / 2 + 2; j <= ladder.m_k(k); ++j)
      EXPECT_LT(*st.at(j).gamma, q(1, 2)) << "k=" << k << " j=" << j;
}

TEST(Stats, Example5BlockRatioAtSpecialLevel) {
  auto ladder = ladder_for(hps::builtin_example5(), 12);
  auto st = hps::stats(ladder);
  QSqrt2 running;
  for (int k = 2; k <= 12; ++k) {
    const int h = k / 2;
    const auto& lv = st.at(ladder.m_k(k - 1) + h);
    const QSqrt2 p = QSqrt2(mpz_class(mpz_class(1) << (k - h + 1)));
    const QSqrt2 expected = (p + QSqrt2(k) * root2_pow(k)) / (p - QSqrt2(1));
    EXPECT_EQ(lv.max_length / lv.min_length, expected) << k;
    running = std::max(running, expected);
    // Odd k stay below 5 (k = 9 gives 64+72*sqrt2 over 63); the prefix maximum does not.
    if (k >= 8) EXPECT_GT(running, QSqrt2(5)) << k;
    if (k == 9 || k == 11) EXPECT_LT(expected, QSqrt2(5)) << k;
  }
  const auto& k8 = st.at(ladder.m_k(7) + 4);
  EXPECT_EQ(k8.max_length / k8.min_length, q(160, 31));
}

TEST(Stats, LemmaInvariants) {
  for (const auto& spec : property_specs()) {
    const int depth = property_depth(spec);
    auto ladder = ladder_for(spec, depth);
    auto st = hps::stats(ladder);
    for (int m = 0; m <= st.top(); ++m) {
      const auto& lv = st.at(m);
      if (m < st.top()) {
        ASSERT_TRUE(lv.beta && lv.Gamma) << spec.name() << " m=" << m;
        EXPECT_GE(lv.beta->sign(), 0);
        EXPECT_LT(*lv.beta, QSqrt2(1));
        EXPECT_GT(lv.Gamma->sign(), 0);
        EXPECT_LE(*lv.Gamma, QSqrt2(1));
        EXPECT_GE(*lv.Gamma, QSqrt2(1) - QSqrt2(5) * *lv.beta) << spec.name() << " m=" << m;
        EXPECT_LE(*st.at(m + 1).lambda, *lv.Gamma) << spec.name() << " m=" << m;
        EXPECT_GE(lv.min_children, 2);
        EXPECT_LE(lv.max_children, 4);
      }
      if (m > 0) {
        EXPECT_GT(lv.gamma->sign(), 0);
        EXPECT_LE(*lv.gamma, QSqrt2(1));
        const QSqrt2 shrink = lv.lenF / st.at(m - 1).lenF;
        EXPECT_LE(shrink, QSqrt2(1)) << spec.name() << " m=" << m;
        EXPECT_LE(shrink, QSqrt2(4) * *lv.Lambda) << spec.name() << " m=" << m;
      }
    }
  }
}

TEST(LevelConstants, Example5LevelTwo) {
  auto spec = hps::builtin_example5();
  auto c = hps::level_constants(spec, 2);
  const QSqrt2 d2 = spec.product(2);
  EXPECT_EQ(c.A, QSqrt2(6) * d2);
  EXPECT_TRUE(c.eta_edge.is_zero());
  EXPECT_EQ(c.B, QSqrt2(6) * d2);
  EXPECT_EQ(c.b, d2);
  EXPECT_EQ(c.argmax, 3);
}

TEST(LevelConstants, UniformFamilies) {
  auto thirds = hps::builtin_uniform(2, mpq_class(1, 3));
  for (int k = 1; k <= 6; ++k) {
    auto c = hps::level_constants(thirds, k);
    const QSqrt2 p = q(1) / QSqrt2(3).pow(k);
    EXPECT_EQ(c.A, p);
    EXPECT_EQ(c.B, p);
    EXPECT_EQ(c.b, p);
    EXPECT_TRUE(c.eta_edge.is_zero());
  }
  auto four = hps::builtin_uniform(4, mpq_class(1, 8));
  auto c = hps::level_constants(four, 3);
  EXPECT_EQ(c.A, c.b);
  EXPECT_LE(c.b, c.B);
  auto edged = hps::level_constants(hps::testing::edged_spec(), 2);
  EXPECT_EQ(edged.eta_edge, q(1, 64));
  EXPECT_THROW(hps::level_constants(hps::builtin_uniform(2, mpq_class(1, 3), 4), 4), std::out_of_range);
}

TEST(Chi, SplitSizes) {
  auto seven = ladder_for(hps::builtin_uniform(7, mpq_class(1, 10), 3), 2);
  EXPECT_EQ(hps::chi(seven, 1, 0), 3);
  EXPECT_EQ(hps::chi(seven, 1, 1), 4);
  auto eight = ladder_for(hps::builtin_uniform(8, mpq_class(1, 10), 3), 2);
  EXPECT_EQ(hps::chi(eight, 1, 0), 4);
  EXPECT_EQ(hps::chi(eight, 1, 1), 4);

  auto ex = ladder_for(hps::builtin_example5(), 8);
  for (int k = 1; k <= 8; ++k)
    for (int j = 0; j < k; ++j) {
      const auto lv = ex.level(ex.m_k(k - 1) + j);
      for (std::size_t b = 0; b < lv.blocks->size(); ++b)
        EXPECT_EQ(hps::chi(ex, lv.m, static_cast<std::int64_t>(b)), mpz_class(1) << (k - j));
    }
  EXPECT_THROW(hps::chi(ex, ex.top(), 0), std::out_of_range);
}

TEST(Chi, DifferByAtMostOne) {
  auto ladder = ladder_for(hps::testing::irregular_spec(), 6);
  for (int m = 0; m < ladder.top(); ++m) {
    const auto lv = ladder.level(m);
    mpz_class lo = hps::chi(ladder, m, 0), hi = lo;
    for (std::size_t b = 1; b < lv.blocks->size(); ++b) {
      mpz_class c = hps::chi(ladder, m, static_cast<std::int64_t>(b));
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    EXPECT_LE(hi - lo, 1) << m;
  }
}

TEST(Density, MiddleThirds) {
  auto st = hps::stats(ladder_for(hps::builtin_uniform(2, mpq_class(1, 3)), 12));
  auto d = hps::density_counters(st, q(1, 2), q(1, 4), 10);
  EXPECT_EQ(d.S, 10);
  EXPECT_EQ(d.T, 0);
  EXPECT_EQ(d.ST, 0);
  auto e = hps::density_counters(st, q(1, 4), q(1, 2), 10);
  EXPECT_EQ(e.S, 0);
  EXPECT_EQ(e.T, 10);
  EXPECT_EQ(e.ST, 0);
  EXPECT_THROW(hps::density_counters(st, q(1, 2), q(1, 2), 13), std::out_of_range);
}

TEST(Conditions, Example5ConstantsGrow) {
  auto spec = hps::builtin_example5();
  auto a = hps::check_condition(spec, "A", 10);
  ASSERT_EQ(a.series.size(), 10u);
  EXPECT_EQ(*a.series[0].value, QSqrt2(1));  // a single middle gap at k = 1
  for (int k = 2; k <= 10; ++k)
    EXPECT_EQ(*a.series[static_cast<std::size_t>(k - 1)].value, QSqrt2(2) + QSqrt2(k) * root2_pow(k)) << k;
  EXPECT_FALSE(a.holds_on_prefix);
  EXPECT_EQ(a.witness_level, 10);
  EXPECT_EQ(a.witness_index, hps::example5_special_gap(10));
  EXPECT_TRUE(a.implies_minimality);

  auto b = hps::check_condition(spec, "B", 10);
  for (int k = 1; k <= 10; ++k)
    EXPECT_EQ(*b.series[static_cast<std::size_t>(k - 1)].value, QSqrt2(2) + QSqrt2(k) * root2_pow(k)) << k;
  EXPECT_FALSE(b.holds_on_prefix);
  EXPECT_EQ(*b.best_constant, QSqrt2(2) + QSqrt2(10) * root2_pow(10));
}

TEST(Conditions, Example5Thm3c) {
  auto v = hps::check_condition(hps::builtin_example5(), "thm3_c", 12);
  EXPECT_EQ(v.levels_examined, 78);
  EXPECT_FALSE(v.holds_on_prefix);
  EXPECT_GT(*v.best_constant, QSqrt2(5));
  EXPECT_EQ(v.witness_level, 66 + 6);
}

TEST(Conditions, Example5Hdim3HoldsButIsNotAMinimalityVerdict) {
  auto v = hps::check_condition(hps::builtin_example5(), "hdim3", 10);
  const QSqrt2 c3 = QSqrt2(8) * hps::builtin_example5().c(3);
  EXPECT_EQ(*v.best_constant, c3);
  EXPECT_EQ(v.witness_level, 3);
  EXPECT_TRUE(v.holds_on_prefix);
  EXPECT_FALSE(v.implies_minimality);
}

TEST(Conditions, UniformIsBounded) {
  auto spec = hps::builtin_uniform(2, mpq_class(1, 3));
  auto a = hps::check_condition(spec, "A", 10);
  EXPECT_EQ(*a.best_constant, QSqrt2(1));
  EXPECT_TRUE(a.holds_on_prefix);
  auto y = hps::check_condition(spec, "yang", 10);
  EXPECT_EQ(*y.best_constant, QSqrt2(1));
  EXPECT_TRUE(y.aux_constant->is_zero());
  auto h4 = hps::check_condition(spec, "hdim4", 10);
  EXPECT_EQ(*h4.best_constant, QSqrt2(2));
  auto c = hps::check_condition(spec, "thm3_c", 10);
  EXPECT_EQ(*c.best_constant, QSqrt2(1));
  EXPECT_TRUE(c.holds_on_prefix);
}

TEST(Conditions, ZeroGapIsUnbounded) {
  auto spec = hps::builtin_uniform(3, mpq_class(1, 3));
  auto a = hps::check_condition(spec, "A", 5);
  EXPECT_FALSE(a.bounded);
  EXPECT_FALSE(a.best_constant.has_value());
  EXPECT_FALSE(a.holds_on_prefix);
  auto h3 = hps::check_condition(spec, "hdim3", 5);
  EXPECT_TRUE(h3.best_constant->is_zero());
  EXPECT_FALSE(h3.holds_on_prefix);
}

TEST(Conditions, Example5Routines) {
  auto spec = hps::builtin_example5();
  hps::ConditionOptions opt;
  opt.alpha = mpq_class(1, 2);
  auto c = hps::check_condition(spec, "routine_c", 10, opt);
  EXPECT_EQ(c.levels_examined, 55);
  EXPECT_TRUE(c.holds_on_prefix);
  EXPECT_GT(*c.last_value, 0.3);
  EXPECT_LT(*c.last_value, 0.7);

  // The Cesaro mean of beta falls roughly like 4/k, so depth 10 is still above the 0.1 threshold.
  auto a = hps::check_condition(spec, "routine_a", 10);
  EXPECT_FALSE(a.holds_on_prefix);
  EXPECT_LT(*a.last_value, 0.3);
  auto ladder = ladder_for(spec, 10);
  for (int k = 3; k <= 10; ++k)
    EXPECT_LT(*a.series[static_cast<std::size_t>(ladder.m_k(k) - 1)].value,
              *a.series[static_cast<std::size_t>(ladder.m_k(k - 1) - 1)].value)
        << k;
  auto t = hps::check_condition(spec, "thm3_b", 10);
  EXPECT_EQ(*t.last_value, *a.last_value);

  auto b = hps::check_condition(spec, "routine_b", 10);
  EXPECT_LT(*b.last_value, 0.0);
  auto f = hps::check_condition(spec, "thm3_a", 10);
  EXPECT_LT(*f.last_value, 0.0);
  EXPECT_EQ(f.series.size(), 55u);
}

TEST(Conditions, MiddleThirdsLimitsDoNotVanish) {
  auto spec = hps::builtin_uniform(2, mpq_class(1, 3));
  auto a = hps::check_condition(spec, "routine_a", 12);
  EXPECT_NEAR(*a.last_value, 1.0 / 3, 1e-12);
  EXPECT_FALSE(a.holds_on_prefix);
  auto f = hps::check_condition(spec, "thm3_a", 12);
  EXPECT_NEAR(*f.last_value, std::log2(2.0 / 3), 1e-12);
  EXPECT_FALSE(f.holds_on_prefix);
}

TEST(Conditions, Errors) {
  auto spec = hps::builtin_example5();
  EXPECT_THROW(hps::check_condition(spec, "nope", 5), std::invalid_argument);
  EXPECT_THROW(hps::check_condition(spec, "A", 2), std::invalid_argument);
  EXPECT_THROW(hps::check_condition(hps::builtin_example5(6), "A", 6), std::invalid_argument);
  for (const auto& id : hps::condition_ids()) EXPECT_NO_THROW(hps::check_condition(spec, id, 4)) << id;
}

TEST(CaseInequalities, HoldWithTheirBestConstants) {
  for (const auto& spec : {hps::testing::irregular_spec(), hps::testing::edged_spec(), hps::builtin_example5()}) {
    const int depth = spec.name() == "irregular" ? 6 : 8;
    auto ladder = ladder_for(spec, depth);
    auto a = hps::check_condition(ladder, hps::stats(ladder), "A", depth);
    auto b = hps::check_condition(ladder, hps::stats(ladder), "B", depth);
    ASSERT_TRUE(a.best_constant && b.best_constant);
    for (const auto& row : hps::case_a_inequalities(ladder, *a.best_constant)) {
      EXPECT_TRUE(row.premise) << spec.name() << " k=" << row.k;
      EXPECT_TRUE(row.holds()) << spec.name() << " k=" << row.k;
    }
    for (const auto& row : hps::case_b_inequalities(ladder, *b.best_constant))
      EXPECT_TRUE(row.holds()) << spec.name() << " k=" << row.k;
  }
}
