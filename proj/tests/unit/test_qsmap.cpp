#include <gtest/gtest.h>

#include <cmath>

#include "hps/qsmap.hpp"

using hps::CertifiedReal;
using hps::QSqrt2;

namespace {

QSqrt2 q(long p, long r = 1) { return QSqrt2(mpq_class(p, r)); }

hps::IntervalTree thirds_tree(int depth) {
  return hps::construction_tree(hps::builtin_uniform(2, mpq_class(1, 3)), depth);
}

// Shared endpoints of enclosed images are equal, not certainly ordered.
bool weakly_leq(const CertifiedReal& a, const CertifiedReal& b) {
  return certainly_leq(a, b) || possibly_equal(a, b);
}

}  // namespace

TEST(QsMap, ExactImages) {
  auto sq = hps::QsMap::power(mpq_class(2));
  EXPECT_EQ(*sq.apply(CertifiedReal(q(1, 3))).exact(), q(1, 9));
  auto root = hps::QsMap::power(mpq_class(1, 2));
  EXPECT_EQ(*root.apply(CertifiedReal(q(1, 4))).exact(), q(1, 2));
  EXPECT_EQ(*root.apply(CertifiedReal(q(1))).exact(), q(1));
  EXPECT_EQ(*root.apply(CertifiedReal(q(1, 2))).exact(), QSqrt2::sqrt2() / QSqrt2(2));
  auto pw = hps::parse_map("pwl:2/3,1/3");
  EXPECT_EQ(*pw.apply(CertifiedReal(q(1, 3))).exact(), q(1, 6));
  EXPECT_EQ(*pw.apply(CertifiedReal(q(5, 6))).exact(), q(2, 3));
  EXPECT_EQ(pw.slope_ratio(), mpq_class(4));
}

TEST(QsMap, InexactPowerIsEnclosed) {
  auto m = hps::QsMap::power(mpq_class(4, 5));
  CertifiedReal y = m.apply(CertifiedReal(q(1, 3)));
  EXPECT_FALSE(y.is_exact());
  EXPECT_NEAR(y.to_double(), std::pow(1.0 / 3, 0.8), 1e-15);
  EXPECT_LT(y.enclosure().width().to_double(), 1e-30);
}

TEST(QsMap, ApplyToIntervals) {
  auto level = hps::enumerate_level(hps::builtin_uniform(2, mpq_class(1, 3)), 2);
  auto same = hps::apply_map(hps::QsMap::identity(), level);
  ASSERT_EQ(same.size(), level.size());
  for (std::size_t i = 0; i < level.size(); ++i) {
    EXPECT_EQ(*same[i].left.exact(), level[i].left);
    EXPECT_EQ(*same[i].right.exact(), level[i].right);
  }
  auto sq = hps::apply_map(hps::QsMap::power(mpq_class(2)), {hps::BasicInterval{1, {1}, q(0), q(1, 3)}});
  EXPECT_EQ(*sq[0].left.exact(), q(0));
  EXPECT_EQ(*sq[0].right.exact(), q(1, 9));
  auto rt = hps::apply_map(hps::QsMap::power(mpq_class(1, 2)), {hps::BasicInterval{1, {1}, q(1, 4), q(1)}});
  EXPECT_EQ(*rt[0].left.exact(), q(1, 2));
  EXPECT_EQ(*rt[0].right.exact(), q(1));
  EXPECT_THROW(hps::apply_map(hps::QsMap::identity(), {hps::BasicInterval{1, {1}, q(1, 2), q(3, 2)}}),
               std::invalid_argument);
}

TEST(QsMap, OrderAndAdjacencyPreserved) {
  auto level = hps::enumerate_level(hps::builtin_example5(), 3);
  for (const char* desc : {"identity", "pow:4/5", "pow:2", "pwl:1/3,1/2;1/2,3/5", "comp:pow:1/2+pwl:1/2,1/4"}) {
    auto images = hps::apply_map(hps::parse_map(desc), level);
    for (std::size_t i = 0; i < images.size(); ++i) {
      EXPECT_TRUE(certainly_less(images[i].left, images[i].right)) << desc;
      if (i > 0) EXPECT_TRUE(weakly_leq(images[i - 1].right, images[i].left)) << desc;
    }
  }
}

TEST(QsMap, TreePushforwardKeepsShape) {
  auto tree = thirds_tree(4);
  auto image = hps::apply_map(hps::QsMap::power(mpq_class(3, 2)), tree);
  ASSERT_EQ(image.node_count(), tree.node_count());
  for (int l = 1; l <= 4; ++l)
    for (const auto& node : image.levels[static_cast<std::size_t>(l)]) {
      const auto& parent = image.levels[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(node.parent)];
      EXPECT_TRUE(weakly_leq(parent.left, node.left));
      EXPECT_TRUE(weakly_leq(node.right, parent.right));
    }
}

TEST(QsMap, DescriptorRoundTrip) {
  for (const char* desc : {"identity", "pow:4/5", "pwl:2/3,1/3", "pwl:1/4,1/2;1/2,3/4", "comp:pow:2+pwl:1/2,1/4+identity"}) {
    auto m = hps::parse_map(desc);
    EXPECT_EQ(m.describe(), desc);
    EXPECT_EQ(hps::parse_map(m.describe()).describe(), desc);
  }
  EXPECT_EQ(hps::parse_map("pow:0.8").describe(), "pow:4/5");
  for (const char* bad : {"", "pow", "pow:", "pow:-1", "pow:0", "pwl:1/2", "pwl:1/2,1/2;1/4,3/4", "pwl:2,1/2",
                          "twist:3", "comp:", "comp:pow:2+nope", "identity:1"})
    EXPECT_THROW(hps::parse_map(bad), std::invalid_argument) << bad;
}

TEST(QsMap, PowerPairFamilyIsExact) {
  auto sq = hps::QsMap::power(mpq_class(2));
  for (long num = 1; num < 20; ++num) {
    const QSqrt2 t = q(num, 20);
    CertifiedReal r = hps::distortion_ratio(sq, CertifiedReal(q(0)), CertifiedReal(q(1)), CertifiedReal(q(0)),
                                            CertifiedReal(t));
    ASSERT_TRUE(r.is_exact());
    EXPECT_EQ(*r.exact(), t * t);
  }
}

TEST(QsMap, NestedPairs) {
  auto tree = thirds_tree(3);
  auto pairs = hps::nested_pairs(tree, 3);
  EXPECT_EQ(pairs.size(), 2u * 1 + 4u * 2 + 8u * 3);
  for (const auto& p : pairs) {
    const auto& I = tree.levels[static_cast<std::size_t>(p.outer_level)][static_cast<std::size_t>(p.outer)];
    const auto& J = tree.levels[static_cast<std::size_t>(p.inner_level)][static_cast<std::size_t>(p.inner)];
    EXPECT_LT(p.outer_level, p.inner_level);
    EXPECT_TRUE(certainly_leq(I.left, J.left));
    EXPECT_TRUE(certainly_leq(J.right, I.right));
  }
  auto a = hps::sample_pairs(thirds_tree(6), 500, 7);
  auto b = hps::sample_pairs(thirds_tree(6), 500, 7);
  ASSERT_EQ(a.size(), 500u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].inner, b[i].inner);
    EXPECT_EQ(a[i].outer, b[i].outer);
  }
}

TEST(Distortion, IdentityIsTight) {
  auto tree = thirds_tree(7);
  auto prof = hps::fit_distortion(hps::QsMap::identity(), tree, hps::sample_pairs(tree, 1000, 1),
                                  hps::nested_pairs(tree, 7));
  EXPECT_EQ(prof.p_hat, 1.0);
  EXPECT_EQ(prof.q_hat, 1.0);
  EXPECT_LE(prof.lambda_hat, 1.0);
  EXPECT_EQ(prof.violations, 0u);
  EXPECT_EQ(prof.max_violation, 0.0);
}

TEST(Distortion, PowerExponentsBracketAlpha) {
  auto tree = thirds_tree(7);
  for (const mpq_class alpha : {mpq_class(4, 5), mpq_class(2), mpq_class(3, 2), mpq_class(1, 2)}) {
    auto prof = hps::fit_distortion(hps::QsMap::power(alpha), tree, hps::sample_pairs(tree, 800, 3));
    EXPECT_LE(prof.p_hat, 1.0);
    EXPECT_GE(prof.q_hat, 1.0);
    EXPECT_GT(prof.lambda_hat, 0.0);
    const double a = alpha.get_d();
    if (a < 1) EXPECT_LE(prof.p_hat, a + 1e-12);
    if (a > 1) EXPECT_GE(prof.q_hat, a - 1e-12);
  }
}

TEST(Distortion, PiecewiseLinearHeldOut) {
  // Slopes 1/2 then 2; training on every pair to depth 5, checking depth 6 exhaustively.
  auto tree = thirds_tree(6);
  auto all = hps::nested_pairs(tree, 6);
  std::vector<hps::NestedPair> train, held;
  for (const auto& p : all) (p.inner_level <= 5 ? train : held).push_back(p);
  auto prof = hps::fit_distortion(hps::parse_map("pwl:2/3,1/3"), tree, train, held);
  EXPECT_TRUE(std::isfinite(prof.q_hat));
  EXPECT_GE(prof.q_hat, 1.0);
  EXPECT_LE(prof.p_hat, 1.0);
  EXPECT_EQ(prof.violations, 0u);
  EXPECT_EQ(prof.max_violation, 0.0);
  EXPECT_EQ(prof.heldout_count, held.size());
}

TEST(Distortion, TooFewPairs) {
  auto tree = thirds_tree(3);
  EXPECT_THROW(hps::fit_distortion(hps::QsMap::identity(), tree, hps::nested_pairs(tree, 3)), std::invalid_argument);
}

TEST(Distortion, DegenerateSample) {
  auto tree = thirds_tree(3);
  std::vector<hps::NestedPair> same(150, hps::NestedPair{0, 0, 1, 0});
  auto prof = hps::fit_distortion(hps::QsMap::power(mpq_class(2)), tree, same);
  EXPECT_TRUE(prof.degenerate);
  EXPECT_EQ(prof.p_hat, 1.0);
  EXPECT_EQ(prof.q_hat, 1.0);
}

TEST(QsMap, TripleRatiosBounded) {
  for (const char* desc : {"identity", "pow:4/5", "pow:2", "pwl:2/3,1/3"}) {
    auto m = hps::parse_map(desc);
    const double a = hps::triple_ratio_bound(m, 10000, 11);
    const double b = hps::triple_ratio_bound(m, 20000, 12);
    EXPECT_TRUE(std::isfinite(a));
    EXPECT_LT(b, 20.0) << desc;
  }
  EXPECT_NEAR(hps::triple_ratio_bound(hps::QsMap::identity(), 10000, 5), 1.0, 1e-9);
}

TEST(ImageBoxDim, IdentityAndInterval) {
  auto scales = hps::geometric_scales(mpq_class(1, 3), 1, 8);
  auto r = hps::image_box_dim(hps::QsMap::identity(), hps::builtin_uniform(2, mpq_class(1, 3)), 10, scales);
  EXPECT_NEAR(r.fitted_slope, 0.6309, 0.05);
  auto full = hps::image_box_dim(hps::QsMap::power(mpq_class(4, 5)), hps::builtin_uniform(2, mpq_class(1, 2)), 10,
                                 hps::geometric_scales(mpq_class(1, 2), 1, 8));
  EXPECT_NEAR(full.fitted_slope, 1.0, 0.05);
}

TEST(ImageBoxDim, PowerKeepsExample5Slope) {
  // Threshold is the identity baseline at the same depth and scales, minus 0.05.
  const auto scales = hps::geometric_scales(mpq_class(1, 2), 6, 18);
  auto base = hps::image_box_dim(hps::QsMap::identity(), hps::builtin_example5(), 5, scales);
  auto pushed = hps::image_box_dim(hps::QsMap::power(mpq_class(4, 5)), hps::builtin_example5(), 5, scales);
  EXPECT_GE(pushed.fitted_slope, base.fitted_slope - 0.05);
  EXPECT_LE(base.fitted_slope, hps::dim_ratio_sequence(hps::builtin_example5(), 5).at(5) + 0.05);
}
