#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hps/construction.hpp"
#include "hps/numeric/interval.hpp"
#include "hps/reconstruction.hpp"

namespace hps {

/// Statistics of one ladder level F_m, computed from a single parent pattern.
///
/// beta and Gamma look one level down (they need F_{m+1}) and are absent at
/// the top level; gamma, Lambda and lambda look one level up and are absent at m = 0.
struct LevelStats {
  int m = 0;
  int k = 0;
  int stage = 0;

  std::optional<QSqrt2> beta;    ///< max |L|/|I| over I in F_m and gaps L of I
  std::optional<QSqrt2> Gamma;   ///< min C(J,1)/|J| over J in F_m
  std::optional<QSqrt2> gamma;   ///< max |J|/|Fa(J)| over J in F_m
  std::optional<QSqrt2> Lambda;  ///< max_{F_m}|I| / min_{F_{m-1}}|I|
  std::optional<QSqrt2> lambda;  ///< min_{F_m}|I| / max_{F_{m-1}}|I|

  QSqrt2 max_length;
  QSqrt2 min_length;
  mpz_class count;  ///< #F_m
  QSqrt2 lenF;      ///< |F_m|

  // Witnesses are block indices within the level's pattern (lowest index on ties).
  std::int64_t beta_block = -1;
  std::int64_t beta_gap = -1;  ///< starred gap index l
  std::int64_t Gamma_block = -1;
  std::int64_t gamma_block = -1;
  std::int64_t max_block = -1;
  std::int64_t min_block = -1;

  /// Children per block of F_m inside F_{m+1}; zero at the top level.
  std::int64_t min_children = 0;
  std::int64_t max_children = 0;
};

struct StatSeries {
  std::vector<LevelStats> levels;  ///< indexed by m = 0..top

  int top() const { return static_cast<int>(levels.size()) - 1; }
  const LevelStats& at(int m) const { return levels.at(static_cast<std::size_t>(m)); }
};

/// All level statistics of the ladder.
StatSeries stats(const RefinementLadder& ladder);

/// The gap constants of level k. Needs level k+1 of the construction.
struct LevelConstants {
  int k = 0;
  QSqrt2 A;         ///< max_{1<=l<n_k} eta_{k,l}
  QSqrt2 min_gap;   ///< min_{1<=l<n_k} eta_{k,l}
  QSqrt2 eta_edge;  ///< eta_{k+1,0} + eta_{k+1,n_{k+1}}
  QSqrt2 B;         ///< A + eta_edge
  QSqrt2 b;         ///< min_gap + eta_edge
  std::int64_t argmax = 0;
  std::int64_t argmin = 0;
};

LevelConstants level_constants(const ConstructionSpec& spec, int k);

/// Number of F_{m_k} intervals inside a block of F_m, where m_{k-1} <= m < m_k.
mpz_class chi(const RefinementLadder& ladder, int m, std::int64_t block);

/// S(m) = #{0 <= j < m : beta_j < eps}, T(m) = #{1 <= j <= m : gamma_j < alpha},
/// ST(m) = #{1 <= j <= m : beta_{j-1} < eps and gamma_j < alpha}.
struct DensityCounts {
  std::int64_t S = 0;
  std::int64_t T = 0;
  std::int64_t ST = 0;
};

DensityCounts density_counters(const StatSeries& series, const QSqrt2& eps, const QSqrt2& alpha, int m);

enum class ConditionKind { Constant, Limit, Density };

struct ConditionOptions {
  mpq_class threshold{1, 10};  ///< limit diagnostics must end below this; densities must stay above it
  mpq_class alpha{1, 2};       ///< routine_c level
  int window = 5;              ///< levels compared by the trend criteria
  long prec = kDefaultPrecision;
};

/// One entry of a verdict's per-level table.
struct LevelValue {
  int index = 0;                ///< k for spec-level conditions, m for ladder conditions
  std::optional<QSqrt2> value;  ///< exact constant; empty when unbounded (division by a zero gap)
  std::optional<ApproxScalar> approx;  ///< diagnostics that leave the field (logs)
  std::int64_t witness = -1;    ///< gap or block index realizing the value
};

/// Outcome of a condition on a finite prefix. Never an asymptotic claim.
struct ConditionVerdict {
  std::string id;
  ConditionKind kind = ConditionKind::Constant;
  int depth = 0;           ///< spec level K examined
  int levels_examined = 0; ///< number of k (spec conditions) or m (ladder conditions)
  bool holds_on_prefix = false;
  bool bounded = true;     ///< every per-level constant was finite
  std::optional<QSqrt2> best_constant;
  std::optional<QSqrt2> aux_constant;  ///< yang: the edge constant c
  std::vector<LevelValue> series;
  std::optional<double> last_value;
  int witness_level = -1;
  std::int64_t witness_index = -1;
  bool implies_minimality = false;  ///< whether the id is one of the minimality hypotheses
  std::string note;
};

/// Known condition ids, in canonical order.
const std::vector<std::string>& condition_ids();

/// Evaluate one condition on levels 1..depth (ladder conditions on m <= m_depth).
/// Throws std::invalid_argument for an unknown id or depth < 3.
ConditionVerdict check_condition(const RefinementLadder& ladder, const StatSeries& series, std::string_view id,
                                 int depth, const ConditionOptions& options = {});

/// Convenience overload that builds the ladder and statistics itself.
ConditionVerdict check_condition(const ConstructionSpec& spec, std::string_view id, int depth,
                                 const ConditionOptions& options = {});

/// |F_{m_{k-1}+i_k-1}| * factor >= |F_{m_{k-1}}| for one scheme k.
struct LevelInequality {
  int k = 0;
  QSqrt2 lhs;
  QSqrt2 rhs;
  bool premise = true;  ///< eta*_{k,0} + eta*_{k,n_k} <= b(k)
  bool holds() const { return lhs >= rhs; }
};

/// Case (A) bound with factor 1 + C, for each scheme of the ladder.
std::vector<LevelInequality> case_a_inequalities(const RefinementLadder& ladder, const QSqrt2& C);
/// Case (B) bound with factor 2 + D.
std::vector<LevelInequality> case_b_inequalities(const RefinementLadder& ladder, const QSqrt2& D);

}  // namespace hps
