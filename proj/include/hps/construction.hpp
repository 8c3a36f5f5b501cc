#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "hps/numeric/qsqrt2.hpp"

namespace hps {

/// A generator could not produce a value (non-integer n_k, DSL evaluation failure...).
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& what, int k, std::int64_t l = -1)
      : std::runtime_error(what), k_(k), l_(l) {}
  int level() const { return k_; }
  std::int64_t index() const { return l_; }

 private:
  int k_;
  std::int64_t l_;
};

class EnumerationTooLarge : public std::runtime_error {
 public:
  EnumerationTooLarge(const mpz_class& count, std::uint64_t cap)
      : std::runtime_error("enumeration too large: " + count.get_str() + " intervals exceed cap " +
                           std::to_string(cap)),
        count_(count) {}
  const mpz_class& count() const { return count_; }

 private:
  mpz_class count_;
};

/// Everything fixed by the construction at one level k >= 1.
struct Level {
  int k = 0;
  std::int64_t n = 0;              ///< number of children per level-(k-1) interval
  QSqrt2 c;                        ///< contraction ratio |J_{sigma*i}| / |J_sigma|
  QSqrt2 product;                  ///< P_k = c_1 ... c_k
  std::vector<QSqrt2> eta;         ///< gaps eta_{k,0..n}, left to right
};

/// (n_k, c_k, eta_{k,l}) data of a homogeneous perfect set on J = [0, 1].
///
/// Generators are evaluated lazily, one level at a time, and memoized. Copies
/// share the memo; all accessors are safe to call from several threads.
class ConstructionSpec {
 public:
  using CountFn = std::function<std::int64_t(int k)>;
  using RatioFn = std::function<QSqrt2(int k)>;
  /// eta(k, l, P_{k-1}, P_k) so that formulas can refer to the level products.
  using GapFn = std::function<QSqrt2(int k, std::int64_t l, const QSqrt2& prev_product,
                                     const QSqrt2& product)>;

  /// Largest n_k that will be tabulated.
  static constexpr std::int64_t kMaxChildren = std::int64_t{1} << 24;

  ConstructionSpec(std::string name, int max_depth, CountFn n, RatioFn c, GapFn eta);

  const std::string& name() const { return state_->name; }
  int max_depth() const { return state_->max_depth; }

  /// Level data for 1 <= k <= max_depth; throws EvalError when a generator fails
  /// or n_k is outside [1, kMaxChildren].
  const Level& level(int k) const;

  std::int64_t n(int k) const { return level(k).n; }
  const QSqrt2& c(int k) const { return level(k).c; }
  const QSqrt2& eta(int k, std::int64_t l) const;
  /// P_k = c_1 ... c_k with P_0 = 1.
  QSqrt2 product(int k) const;
  /// n_1 ... n_k as a big integer (1 for k = 0).
  mpz_class count(int k) const;

  /// Same spec with eta_{k,l} shifted by `delta`.
  ConstructionSpec with_gap_offset(int k, std::int64_t l, const QSqrt2& delta) const;
  ConstructionSpec renamed(std::string name) const;

 private:
  struct State {
    std::string name;
    int max_depth;
    CountFn n;
    RatioFn c;
    GapFn eta;
    mutable std::mutex mu;
    mutable std::deque<Level> levels;  // levels[k-1]; deque keeps references stable
  };
  std::shared_ptr<State> state_;
};

/// One constraint violated by a spec.
struct Violation {
  enum class Kind { ChildCount, Ratio, NegativeGap, GapSum, Evaluation };
  Kind kind;
  int level;
  std::int64_t index;  ///< gap index for NegativeGap, -1 otherwise
  std::string message;
};

std::string to_string(Violation::Kind kind);

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Check n_k >= 2, 0 < c_k < 1, eta >= 0 and the gap-sum identity
/// sum_l eta_{k,l} + n_k P_k = P_{k-1} exactly for all k <= depth.
ValidationReport validate(const ConstructionSpec& spec, int depth);

/// A closed basic interval J_sigma.
struct BasicInterval {
  int level = 0;
  std::vector<std::int64_t> index;  ///< sigma = (sigma_1, ..., sigma_k), 1-based
  QSqrt2 left;
  QSqrt2 right;
  QSqrt2 length() const { return right - left; }
};

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

/// All n_1 ... n_k intervals of level k in left-to-right order.
/// Throws EnumerationTooLarge when the count exceeds `cap`.
std::vector<BasicInterval> enumerate_level(const ConstructionSpec& spec, int k,
                                           std::uint64_t cap = kDefaultEnumerationCap);

/// Built-in families by name.
///   uniform(n, c)       n equal children, equal middle gaps, no edge gaps
///   middle_alpha(alpha) two children, middle gap alpha * |J|
///   example5            n_k = 2^k, c_k = 1/(2^(k+1) + k sqrt2^k), one enlarged gap
///   remark_example      n_k = 2^k, c_k = 1/(3 2^k), enlarged last middle gap
ConstructionSpec builtin_uniform(std::int64_t n, const mpq_class& c, int max_depth = 64);
ConstructionSpec builtin_middle_alpha(const mpq_class& alpha, int max_depth = 64);
ConstructionSpec builtin_example5(int max_depth = 40);
ConstructionSpec builtin_remark_example(int max_depth = 40);

/// Index of the enlarged gap of the example5 family, 2^k - 2^(k - floor(k/2) - 1).
std::int64_t example5_special_gap(int k);

/// Dispatch on a descriptor such as "uniform:2,1/3", "middle_alpha:1/5", "example5".
/// Throws std::invalid_argument for unknown names or out-of-range parameters.
ConstructionSpec builtin(const std::string& descriptor);

}  // namespace hps
