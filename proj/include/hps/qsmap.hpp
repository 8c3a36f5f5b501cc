#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hps/construction.hpp"
#include "hps/dimension.hpp"
#include "hps/numeric/certified.hpp"
#include "hps/reconstruction.hpp"

namespace hps {

/// An increasing homeomorphism of [0, 1] fixing both ends.
class QsMap {
 public:
  enum class Kind { Identity, Power, PiecewiseLinear, Composition };

  static QsMap identity();
  /// x -> x^alpha on [0, 1], alpha > 0 rational.
  static QsMap power(const mpq_class& alpha);
  /// Linear between the breakpoints; (0,0) and (1,1) are added when missing.
  /// Both coordinates must increase strictly.
  static QsMap piecewise_linear(std::vector<std::pair<mpq_class, mpq_class>> breakpoints);
  /// x -> second(first(x)).
  static QsMap compose(const QsMap& first, const QsMap& second);

  Kind kind() const { return kind_; }
  const mpq_class& alpha() const { return alpha_; }
  const std::vector<std::pair<mpq_class, mpq_class>>& breakpoints() const { return points_; }
  /// Largest slope over smallest slope of a piecewise-linear map, 1 otherwise.
  mpq_class slope_ratio() const;

  /// Image of x in [0, 1]; exact when the value stays in Q(sqrt 2).
  CertifiedReal apply(const CertifiedReal& x) const;
  /// Enclosure of the image of every point of x (the map is increasing).
  Interval apply(const Interval& x) const;
  double apply(double x) const;

  /// Descriptor in the CLI syntax; parse_map(describe()) rebuilds the map.
  std::string describe() const;

 private:
  Kind kind_ = Kind::Identity;
  mpq_class alpha_ = 1;
  std::vector<std::pair<mpq_class, mpq_class>> points_;
  std::vector<QsMap> parts_;
};

/// identity | pow:ALPHA | pwl:x1,y1;x2,y2;... | comp:F+G+... (applied left to right).
/// Throws std::invalid_argument with the expected grammar.
QsMap parse_map(std::string_view descriptor);

struct ImageInterval {
  CertifiedReal left;
  CertifiedReal right;
};

/// Images of intervals inside [0, 1], in input order. Throws
/// std::invalid_argument for an interval leaving [0, 1].
std::vector<ImageInterval> apply_map(const QsMap& map, const std::vector<BasicInterval>& intervals,
                                     long prec = kDefaultPrecision);
/// The same tree with every endpoint mapped.
IntervalTree apply_map(const QsMap& map, const IntervalTree& tree);

/// A nested pair J inside I of tree nodes, J strictly below I.
struct NestedPair {
  int outer_level = 0;
  std::int64_t outer = 0;
  int inner_level = 0;
  std::int64_t inner = 0;
};

/// Every (ancestor, descendant) pair with descendant level in 1..max_level.
std::vector<NestedPair> nested_pairs(const IntervalTree& tree, int max_level);
/// `count` pairs drawn uniformly by descendant, then ancestor level (fixed seed).
std::vector<NestedPair> sample_pairs(const IntervalTree& tree, std::size_t count, std::uint64_t seed);

/// Empirical envelope lambda x^q <= y <= 4 x^p for x = |J|/|I|, y = |f(J)|/|f(I)|.
struct DistortionProfile {
  double lambda_hat = 1;
  double p_hat = 1;
  double q_hat = 1;
  std::size_t sample_count = 0;
  std::size_t heldout_count = 0;
  /// Largest relative excess beyond either bound over the held-out pairs; 0 when none.
  double max_violation = 0;
  std::size_t violations = 0;
  bool degenerate = false;
};

/// Needs at least 100 training pairs. p_hat and q_hat are the extremal slopes
/// of log y against log x, clipped to p_hat <= 1 <= q_hat; lambda_hat is the
/// largest lambda <= 1 making the lower bound hold on the training pairs.
DistortionProfile fit_distortion(const QsMap& map, const IntervalTree& tree, const std::vector<NestedPair>& train,
                                 const std::vector<NestedPair>& heldout = {});

/// Exact |f(J)|/|f(I)| where possible.
CertifiedReal distortion_ratio(const QsMap& map, const CertifiedReal& I_left, const CertifiedReal& I_right,
                               const CertifiedReal& J_left, const CertifiedReal& J_right);

/// max |f(x+t)-f(x)| / |f(x)-f(x-t)| (and its reciprocal) over random
/// symmetric triples inside [0, 1].
double triple_ratio_bound(const QsMap& map, std::size_t samples, std::uint64_t seed);

/// Box-count fit of the images of the level-depth intervals.
BoxCountResult image_box_dim(const QsMap& map, const ConstructionSpec& spec, int depth,
                             const std::vector<mpq_class>& scales, std::uint64_t cap = kDefaultEnumerationCap,
                             long prec = kDefaultPrecision);

}  // namespace hps
