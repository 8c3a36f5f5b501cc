#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "hps/numeric/certified.hpp"
#include "hps/reconstruction.hpp"

namespace hps {

/// The d-exponent mass distribution on a finite interval tree: the root has
/// mass 1 and a node's mass splits among its children proportionally to |child|^d.
struct MassDistribution {
  mpq_class d;
  IntervalTree tree;
  /// weight[l][i] is the mass of tree.levels[l][i].
  std::vector<std::vector<CertifiedReal>> weight;
  /// C(J, d) = sum of |child|^d and C(J, 1) = sum of |child|, per node with children.
  std::vector<std::vector<CertifiedReal>> c_d;
  std::vector<std::vector<CertifiedReal>> c_1;

  int depth() const { return tree.depth(); }
  const CertifiedReal& mu(int level, std::int64_t index) const {
    return weight.at(static_cast<std::size_t>(level)).at(static_cast<std::size_t>(index));
  }
};

/// Requires 0 < d < 1. Weights are exact whenever the child length ratios
/// raised to d stay in Q(sqrt 2), certified enclosures otherwise.
/// Throws std::domain_error naming the first node with a zero-length child.
MassDistribution build_measure(const IntervalTree& tree, const mpq_class& d, long prec = kDefaultPrecision);

struct ConservationReport {
  std::size_t nodes = 0;
  std::size_t exact_nodes = 0;  ///< parent and children all exact, sum compared exactly
  std::size_t failures = 0;     ///< exact mismatch, or enclosures that cannot agree
  double max_width = 0;         ///< widest child-sum enclosure among inexact nodes
  bool ok() const { return failures == 0; }
};

/// Checks sum of child weights = parent weight at every internal node.
ConservationReport check_conservation(const MassDistribution& mu);

struct NormalizerReport {
  std::size_t nodes = 0;
  std::size_t violations = 0;  ///< nodes where C(J,d) < C(J,1)^d is not excluded
  double min_ratio = 0;        ///< smallest C(J,d) / C(J,1)^d
  bool ok() const { return violations == 0; }
};

/// Checks C(J,d) >= C(J,1)^d at every internal node.
NormalizerReport check_normalizers(const MassDistribution& mu);

/// Closed interval [left, right].
struct Segment {
  CertifiedReal left;
  CertifiedReal right;
};

struct MeasureBounds {
  CertifiedReal lower;  ///< mass of level-depth nodes certainly inside U
  CertifiedReal upper;  ///< lower plus the mass of nodes meeting U otherwise
};

/// Bounds on mu(U) from the nodes of level `depth` (-1: the deepest level).
MeasureBounds measure_of_interval(const MassDistribution& mu, const Segment& U, int depth = -1);

struct HolderResult {
  double max_ratio = 0;  ///< upper(U) / |U|^d, rounded up
  std::size_t argmax = 0;
  std::vector<double> ratios;
};

/// Empirical Hoelder constant of mu over the sample. Degenerate segments
/// are rejected with std::invalid_argument.
HolderResult holder_diagnostic(const MassDistribution& mu, const std::vector<Segment>& sample, int depth = -1);

/// The nodes of one tree level as segments.
std::vector<Segment> level_segments(const IntervalTree& tree, int level);

/// Level-k nodes inside U whose parent is not inside U (level 0: the root if inside).
std::vector<std::int64_t> phi_cover(const IntervalTree& tree, const Segment& U, int level);

/// `count` random segments inside the root with rational dyadic endpoints (fixed seed).
std::vector<Segment> random_segments(const IntervalTree& tree, std::size_t count, std::uint64_t seed);

/// Per-level CSV of the Hoelder ratio of every node: "level,max_ratio".
std::string holder_csv(const MassDistribution& mu);

}  // namespace hps
