#pragma once

#include "hps/construction.hpp"

namespace hps::testing {

/// Irregular family with nonzero edge gaps: n_k cycles through 5, 8, 11,
/// children take half of the parent and the gaps share the rest with weights
/// (l mod 4) + 1.
inline ConstructionSpec irregular_spec(int max_depth = 8) {
  auto n = [](int k) -> std::int64_t { return 5 + 3 * ((k - 1) % 3); };
  auto c = [n](int k) { return QSqrt2(mpq_class(1, 2 * n(k))); };
  auto eta = [n](int k, std::int64_t l, const QSqrt2& prev, const QSqrt2&) {
    const std::int64_t nk = n(k);
    long total = 0;
    for (std::int64_t j = 0; j <= nk; ++j) total += static_cast<long>(j % 4) + 1;
    return QSqrt2(mpq_class(static_cast<long>(l % 4) + 1, 2 * total)) * prev;
  };
  return ConstructionSpec("irregular", max_depth, n, c, eta);
}

/// Two children of ratio 1/4 with edge gaps P/8 and middle gap P/4.
inline ConstructionSpec edged_spec(int max_depth = 12) {
  return ConstructionSpec(
      "edged", max_depth, [](int) -> std::int64_t { return 2; }, [](int) { return QSqrt2(mpq_class(1, 4)); },
      [](int, std::int64_t l, const QSqrt2& prev, const QSqrt2&) {
        return QSqrt2(l == 1 ? mpq_class(1, 4) : mpq_class(1, 8)) * prev;
      });
}

}  // namespace hps::testing
