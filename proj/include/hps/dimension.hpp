#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "hps/construction.hpp"
#include "hps/numeric/certified.hpp"
#include "hps/reconstruction.hpp"

namespace hps {

/// s_k = log(n_1 ... n_k) / -log(delta_k) for k = 1..K.
struct DimRatioSeries {
  enum class Trend { Increasing, Decreasing, Constant, Mixed };

  std::vector<Interval> s;          ///< s[k-1], each of width <= tolerance
  std::vector<ApproxScalar> value;  ///< midpoint form of s
  std::vector<double> tail_min;     ///< tail_min[k-1] = min_{k <= j <= K} s_j
  double liminf_prefix = 0;         ///< min of s_j over the second half of the range
  Trend trend = Trend::Mixed;       ///< over the last five terms
  long precision_used = 0;          ///< largest working precision needed

  int size() const { return static_cast<int>(s.size()); }
  double at(int k) const { return value.at(static_cast<std::size_t>(k - 1)).to_double(); }
};

std::string to_string(DimRatioSeries::Trend trend);

/// Needs level K+1 of the construction. Precision doubles from `prec` until every s_k
/// is enclosed in an interval of width <= tolerance. Throws std::logic_error
/// when some delta_k >= 1.
DimRatioSeries dim_ratio_sequence(const ConstructionSpec& spec, int K, long prec = kDefaultPrecision,
                                  double tolerance = 1e-12);

/// Closed interval (or point when left == right) fed to the box counter.
struct BoxItem {
  CertifiedReal left;
  CertifiedReal right;
};

struct BoxCountResult {
  std::vector<mpq_class> scales;   ///< decreasing
  std::vector<mpz_class> counts;   ///< nondecreasing
  double fitted_slope = 0;         ///< least squares slope of log count against log(1/scale)
  double residual = 0;             ///< root mean square residual of that fit
};

/// Number of grid cells [i s, (i+1) s) meeting each item, for every scale s.
/// A nondegenerate interval meets a cell when the overlap has positive length;
/// a point meets the cell that contains it. Inexact endpoints are widened to
/// their enclosures, so counts are then upper bounds.
/// Throws std::invalid_argument on empty input or bad scales.
BoxCountResult box_count(const std::vector<BoxItem>& items, const std::vector<mpq_class>& scales);

std::vector<BoxItem> box_items(const std::vector<BasicInterval>& intervals);
std::vector<BoxItem> box_items(const IntervalTree& tree, int level);
/// Both endpoints of every interval, as points.
std::vector<BoxItem> endpoint_items(const std::vector<BasicInterval>& intervals);

/// base^from, ..., base^to for a rational base in (0, 1).
std::vector<mpq_class> geometric_scales(const mpq_class& base, int from, int to);

/// Rows "k,s_k" and "scale,count" with a header line.
std::string to_csv(const DimRatioSeries& series);
std::string to_csv(const BoxCountResult& result);

}  // namespace hps
