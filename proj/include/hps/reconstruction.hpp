#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "hps/construction.hpp"
#include "hps/numeric/certified.hpp"

namespace hps {

/// The trimmed construction: every J_sigma is replaced by J*_sigma, obtained by
/// cutting off the leftmost and rightmost gaps of its children.
class StarredSpec {
 public:
  const ConstructionSpec& base() const { return base_; }
  /// Largest k with delta_k, c*_k and eta*_{k,.} available.
  int depth() const { return depth_; }

  /// delta_k = |J*_sigma| for sigma of length k, 0 <= k <= depth().
  const QSqrt2& delta(int k) const;
  /// c*_k = delta_k / delta_{k-1}, 1 <= k <= depth().
  QSqrt2 c_star(int k) const;
  /// eta*_{k,0..n_k}, 1 <= k <= depth().
  const std::vector<QSqrt2>& eta_star(int k) const;
  std::int64_t n(int k) const { return base_.n(k); }

  const QSqrt2& root_left() const { return root_left_; }
  const QSqrt2& root_right() const { return root_right_; }

 private:
  friend StarredSpec star_transform(const ConstructionSpec& spec, int depth);
  explicit StarredSpec(ConstructionSpec base) : base_(std::move(base)) {}

  ConstructionSpec base_;
  int depth_ = 0;
  std::vector<QSqrt2> delta_;
  std::vector<std::vector<QSqrt2>> eta_star_;  // eta_star_[k-1]
  QSqrt2 root_left_;
  QSqrt2 root_right_;
};

/// Trim to depth `depth` (default: one below max_depth(), since delta_k
/// reads level k+1). Throws std::invalid_argument when some delta_k <= 0 and
/// std::out_of_range when depth is too large.
StarredSpec star_transform(const ConstructionSpec& spec, int depth = -1);

/// Intervals of E*_k in left-to-right order.
std::vector<BasicInterval> enumerate_starred(const StarredSpec& star, int k,
                                             std::uint64_t cap = kDefaultEnumerationCap);

/// 2^i <= n < 2^(i+1).
int ladder_exponent(std::int64_t n);

/// A block of the ladder: the hull of the starred children first..last
/// (1-based) of one level-(k-1) starred parent.
struct Block {
  std::int64_t first = 0;
  std::int64_t last = 0;
  QSqrt2 length;
  std::int64_t parent = -1;  ///< index in the previous stage of the same scheme; -1 at stage 0

  std::int64_t span() const { return last - first + 1; }
};

/// View of F_m inside a single starred parent: m = m_{k-1} + stage.
struct LadderLevel {
  int m = 0;
  int k = 0;
  int stage = 0;
  mpz_class multiplicity;  ///< number of parents, n_1 ... n_{k-1}
  const std::vector<Block>* blocks = nullptr;
};

/// The family {F_m}: for each k the subdivision of one starred level-(k-1)
/// parent, stage by stage. Stage 0 is the parent itself, stage i_k its n_k
/// starred children; each intermediate block splits after child floor(t/2).
class RefinementLadder {
 public:
  const StarredSpec& star() const { return star_; }
  int depth_k() const { return static_cast<int>(schemes_.size()); }
  /// m_K for K = depth_k().
  int top() const { return m_.back(); }
  /// m_k = i_1 + ... + i_k; m_0 = 0.
  int m_k(int k) const { return m_.at(static_cast<std::size_t>(k)); }
  int i_k(int k) const { return scheme(k).i; }

  /// Level m in 0..top(). Level m_k (k < depth_k) is stage 0 of scheme k+1;
  /// the top level is the last stage of scheme depth_k.
  LadderLevel level(int m) const;
  /// Blocks of scheme k at stage s, 0 <= s <= i_k.
  const std::vector<Block>& stage(int k, int s) const;
  /// Stage-s blocks of scheme k whose parent is `parent` (a stage s-1 block).
  std::vector<std::int64_t> children(int k, int s, std::int64_t parent) const;

  /// Gaps strictly between the children of `blocks[idx]` at stage s of scheme k,
  /// plus the two edge gaps at stage 0, as (gap index l, eta*_{k,l}).
  std::vector<std::pair<std::int64_t, QSqrt2>> contained_gaps(int k, int s, std::int64_t idx) const;
  /// Sum_{l=a}^{b-1} eta*_{k,l}.
  QSqrt2 gap_sum(int k, std::int64_t a, std::int64_t b) const;
  /// Offset of the left end of starred child a from the left end of its parent.
  QSqrt2 child_offset(int k, std::int64_t a) const;

 private:
  friend RefinementLadder binary_refine(const StarredSpec& star, int depth_k);
  struct Scheme {
    int k = 0;
    int i = 0;
    mpz_class multiplicity;
    std::vector<QSqrt2> prefix;  // prefix[l] = sum_{j=1}^{l} eta*_{k,j}
    std::vector<std::vector<Block>> stages;
  };
  explicit RefinementLadder(StarredSpec star) : star_(std::move(star)) {}
  const Scheme& scheme(int k) const;

  StarredSpec star_;
  std::vector<Scheme> schemes_;
  std::vector<int> m_;
};

/// Upper bound on the stored blocks of one ladder.
inline constexpr std::uint64_t kMaxPatternBlocks = std::uint64_t{1} << 23;

/// Build schemes 1..depth_k (default: star.depth()).
RefinementLadder binary_refine(const StarredSpec& star, int depth_k = -1);

struct FamilySizes {
  mpz_class count;
  QSqrt2 total_length;
};

/// Number of intervals of F_m and |F_m|.
FamilySizes family_sizes(const RefinementLadder& ladder, int m);

/// One interval of a materialized F_m with its position in the level above.
struct PlacedBlock {
  QSqrt2 left;
  QSqrt2 right;
  std::int64_t parent = -1;  ///< index into level m-1, -1 at m = 0
};

/// All intervals of F_0, ..., F_m with exact endpoints.
/// Throws EnumerationTooLarge when the total exceeds cap.
std::vector<std::vector<PlacedBlock>> materialize(const RefinementLadder& ladder, int m,
                                                  std::uint64_t cap = kDefaultEnumerationCap);

/// Nested interval families with certified (possibly exact) endpoints.
struct IntervalTree {
  struct Node {
    CertifiedReal left;
    CertifiedReal right;
    std::int64_t parent = -1;
    std::vector<std::int64_t> children;
    CertifiedReal length() const { return right - left; }
  };
  std::vector<std::vector<Node>> levels;

  int depth() const { return static_cast<int>(levels.size()) - 1; }
  std::size_t node_count() const;
};

/// Tree of F_0 ⊇ ... ⊇ F_m.
IntervalTree materialize_tree(const RefinementLadder& ladder, int m, std::uint64_t cap = kDefaultEnumerationCap,
                              long prec = kDefaultPrecision);

/// Tree of E_0 ⊇ ... ⊇ E_k from the original construction.
IntervalTree construction_tree(const ConstructionSpec& spec, int k, std::uint64_t cap = kDefaultEnumerationCap,
                               long prec = kDefaultPrecision);

}  // namespace hps
