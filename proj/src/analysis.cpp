#include "hps/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hps {

StatSeries stats(const RefinementLadder& ladder) {
  StatSeries out;
  const int top = ladder.top();
  out.levels.resize(static_cast<std::size_t>(top) + 1);

  for (int m = 0; m <= top; ++m) {
    LadderLevel lv = ladder.level(m);
    LevelStats& st = out.levels[static_cast<std::size_t>(m)];
    st.m = m;
    st.k = lv.k;
    st.stage = lv.stage;
    const auto& blocks = *lv.blocks;
    QSqrt2 sum;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const QSqrt2& len = blocks[i].length;
      sum += len;
      if (st.max_block < 0 || len > st.max_length) {
        st.max_length = len;
        st.max_block = static_cast<std::int64_t>(i);
      }
      if (st.min_block < 0 || len < st.min_length) {
        st.min_length = len;
        st.min_block = static_cast<std::int64_t>(i);
      }
    }
    st.count = lv.multiplicity * static_cast<unsigned long>(blocks.size());
    st.lenF = QSqrt2(lv.multiplicity) * sum;
  }

  for (int k = 1; k <= ladder.depth_k(); ++k) {
    for (int s = 0; s < ladder.i_k(k); ++s) {
      const int m = ladder.m_k(k - 1) + s;
      LevelStats& up = out.levels[static_cast<std::size_t>(m)];
      LevelStats& down = out.levels[static_cast<std::size_t>(m) + 1];
      const auto& parents = ladder.stage(k, s);
      const auto& kids = ladder.stage(k, s + 1);

      // beta_m: largest gap relative to its block.
      for (std::size_t p = 0; p < parents.size(); ++p) {
        const auto gaps = ladder.contained_gaps(k, s, static_cast<std::int64_t>(p));
        std::int64_t best_gap = -1;
        QSqrt2 best;
        for (const auto& [l, g] : gaps) {
          if (best_gap < 0 || g > best) {
            best = g;
            best_gap = l;
          }
        }
        if (best_gap < 0) continue;
        QSqrt2 r = best / parents[p].length;
        if (!up.beta || r > *up.beta) {
          up.beta = r;
          up.beta_block = static_cast<std::int64_t>(p);
          up.beta_gap = best_gap;
        }
      }

      // Gamma_m and the children counts.
      std::vector<QSqrt2> surviving(parents.size());
      std::vector<std::int64_t> nkids(parents.size(), 0);
      for (const Block& c : kids) {
        surviving[static_cast<std::size_t>(c.parent)] += c.length;
        ++nkids[static_cast<std::size_t>(c.parent)];
      }
      for (std::size_t p = 0; p < parents.size(); ++p) {
        QSqrt2 r = surviving[p] / parents[p].length;
        if (!up.Gamma || r < *up.Gamma) {
          up.Gamma = r;
          up.Gamma_block = static_cast<std::int64_t>(p);
        }
      }
      up.min_children = *std::min_element(nkids.begin(), nkids.end());
      up.max_children = *std::max_element(nkids.begin(), nkids.end());

      // gamma_{m+1}: largest child relative to its father.
      for (std::size_t c = 0; c < kids.size(); ++c) {
        QSqrt2 r = kids[c].length / parents[static_cast<std::size_t>(kids[c].parent)].length;
        if (!down.gamma || r > *down.gamma) {
          down.gamma = r;
          down.gamma_block = static_cast<std::int64_t>(c);
        }
      }
      down.Lambda = down.max_length / up.min_length;
      down.lambda = down.min_length / up.max_length;
    }
  }
  return out;
}

LevelConstants level_constants(const ConstructionSpec& spec, int k) {
  if (k < 1 || k + 1 > spec.max_depth()) throw std::out_of_range("level_constants needs 1 <= k < max_depth");
  const Level& lv = spec.level(k);
  const Level& next = spec.level(k + 1);
  LevelConstants out;
  out.k = k;
  out.argmax = out.argmin = 1;
  out.A = out.min_gap = lv.eta[1];
  for (std::int64_t l = 2; l < lv.n; ++l) {
    const QSqrt2& g = lv.eta[static_cast<std::size_t>(l)];
    if (g > out.A) {
      out.A = g;
      out.argmax = l;
    }
    if (g < out.min_gap) {
      out.min_gap = g;
      out.argmin = l;
    }
  }
  out.eta_edge = next.eta.front() + next.eta.back();
  out.B = out.A + out.eta_edge;
  out.b = out.min_gap + out.eta_edge;
  return out;
}

mpz_class chi(const RefinementLadder& ladder, int m, std::int64_t block) {
  if (m < 0 || m >= ladder.top()) throw std::out_of_range("chi needs m_{k-1} <= m < m_k inside the ladder");
  LadderLevel lv = ladder.level(m);
  return mpz_class(static_cast<long>(lv.blocks->at(static_cast<std::size_t>(block)).span()));
}

DensityCounts density_counters(const StatSeries& series, const QSqrt2& eps, const QSqrt2& alpha, int m) {
  if (m < 0 || m > series.top()) throw std::out_of_range("density counter beyond the ladder");
  DensityCounts out;
  for (int j = 0; j < m; ++j) {
    const auto& b = series.at(j).beta;
    if (b && *b < eps) ++out.S;
  }
  for (int j = 1; j <= m; ++j) {
    const auto& g = series.at(j).gamma;
    const auto& b = series.at(j - 1).beta;
    const bool small_gamma = g && *g < alpha;
    if (small_gamma) ++out.T;
    if (small_gamma && b && *b < eps) ++out.ST;
  }
  return out;
}

const std::vector<std::string>& condition_ids() {
  static const std::vector<std::string> ids = {"hdim1",    "hdim2",     "hdim3",     "hdim4",  "A",
                                               "B",        "yang",      "thm3_c",    "routine_a",
                                               "routine_b", "routine_c", "thm3_a",   "thm3_b"};
  return ids;
}

namespace {

struct GapExtremes {
  QSqrt2 max;
  QSqrt2 min;
  std::int64_t argmax = 1;
  std::int64_t argmin = 1;
};

GapExtremes middle_gaps(const Level& lv) {
  GapExtremes g;
  g.max = g.min = lv.eta[1];
  for (std::int64_t l = 2; l < lv.n; ++l) {
    const QSqrt2& x = lv.eta[static_cast<std::size_t>(l)];
    if (x > g.max) {
      g.max = x;
      g.argmax = l;
    }
    if (x < g.min) {
      g.min = x;
      g.argmin = l;
    }
  }
  return g;
}

std::optional<QSqrt2> ratio(const QSqrt2& num, const QSqrt2& den) {
  if (den.is_zero()) return std::nullopt;
  return num / den;
}

// Record the extreme (max unless `minimize`) of the per-level constants and
// decide stability: the running extreme must not move over the last window levels.
// `cut` is the series index whose running extreme must equal the final one;
// a negative cut means the prefix is too short to judge.
void finish_constant(ConditionVerdict& v, bool minimize, int cut) {
  v.levels_examined = static_cast<int>(v.series.size());
  std::optional<QSqrt2> best;
  std::optional<QSqrt2> best_before_window;
  for (int i = 0; i < v.levels_examined; ++i) {
    const LevelValue& e = v.series[static_cast<std::size_t>(i)];
    if (!e.value) {
      v.bounded = false;
      v.witness_level = e.index;
      v.witness_index = e.witness;
      break;
    }
    const bool better = !best || (minimize ? *e.value < *best : *e.value > *best);
    if (better) {
      best = e.value;
      v.witness_level = e.index;
      v.witness_index = e.witness;
    }
    if (i == cut) best_before_window = best;
  }
  if (!v.bounded) {
    v.best_constant.reset();
    v.holds_on_prefix = false;
    return;
  }
  v.best_constant = best;
  v.last_value = best->to_double();
  v.holds_on_prefix = best_before_window.has_value() && *best_before_window == *best;
  if (cut < 0) v.note += " prefix shorter than the stability window;";
}

// Trend criterion for diagnostics that should tend to 0.
void finish_limit(ConditionVerdict& v, const ConditionOptions& options) {
  v.levels_examined = static_cast<int>(v.series.size());
  if (v.series.empty()) return;
  auto value_of = [](const LevelValue& e) {
    return e.approx ? e.approx->to_double() : e.value->to_double();
  };
  const double last = std::abs(value_of(v.series.back()));
  v.last_value = value_of(v.series.back());
  v.witness_level = v.series.back().index;
  const double threshold = options.threshold.get_d();
  if (v.levels_examined <= options.window) {
    v.holds_on_prefix = false;
    v.note += " prefix shorter than the trend window;";
    return;
  }
  const double earlier =
      std::abs(value_of(v.series[static_cast<std::size_t>(v.levels_examined - 1 - options.window)]));
  v.holds_on_prefix = last < earlier && last < threshold;
}

void finish_density(ConditionVerdict& v, const ConditionOptions& options) {
  v.levels_examined = static_cast<int>(v.series.size());
  if (v.series.empty()) return;
  v.last_value = v.series.back().value->to_double();
  const int from = std::max(0, v.levels_examined - options.window);
  std::optional<QSqrt2> low;
  for (int i = from; i < v.levels_examined; ++i) {
    const LevelValue& e = v.series[static_cast<std::size_t>(i)];
    if (!low || *e.value < *low) {
      low = e.value;
      v.witness_level = e.index;
    }
  }
  v.best_constant = low;
  v.holds_on_prefix = *low >= QSqrt2(options.threshold);
}

bool is_spec_level(std::string_view id) {
  return id == "hdim1" || id == "hdim2" || id == "hdim3" || id == "hdim4" || id == "A" || id == "B" || id == "yang";
}

}  // namespace

ConditionVerdict check_condition(const RefinementLadder& ladder, const StatSeries& series, std::string_view id,
                                 int depth, const ConditionOptions& options) {
  const auto& ids = condition_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end())
    throw std::invalid_argument("unknown condition id '" + std::string(id) + "'");
  if (depth < 3)
    throw std::invalid_argument("depth " + std::to_string(depth) +
                                " is too small: conditions are judged on at least 3 levels");
  if (depth > ladder.depth_k())
    throw std::invalid_argument("depth " + std::to_string(depth) + " exceeds the ladder depth " +
                                std::to_string(ladder.depth_k()));
  if (options.window < 1) throw std::invalid_argument("trend window must be positive");

  const ConstructionSpec& spec = ladder.star().base();
  ConditionVerdict v;
  v.id = std::string(id);
  v.depth = depth;
  v.implies_minimality = !id.starts_with("hdim");

  if (is_spec_level(id)) {
    v.kind = ConditionKind::Constant;
    std::optional<QSqrt2> aux;
    for (int k = 1; k <= depth; ++k) {
      const Level& lv = spec.level(k);
      const GapExtremes g = middle_gaps(lv);
      LevelValue e;
      e.index = k;
      if (id == "hdim1" || id == "A" || id == "yang") {
        e.value = ratio(g.max, g.min);
        e.witness = e.value ? g.argmax : g.argmin;
      } else if (id == "hdim2" || id == "B") {
        e.value = g.max / lv.product;
        e.witness = g.argmax;
      } else if (id == "hdim3") {
        e.value = QSqrt2(lv.n) * g.min / spec.product(k - 1);
        e.witness = g.argmin;
      } else {
        e.value = QSqrt2(lv.n);
      }
      if (id == "yang") {
        auto c = ratio(lv.eta.front() + lv.eta.back(), g.min);
        if (!c) e.value.reset();
        else if (!aux || *c > *aux) aux = c;
      }
      v.series.push_back(std::move(e));
    }
    finish_constant(v, id == "hdim3", depth - 1 - options.window);
    if (id == "hdim3" && v.best_constant && v.best_constant->is_zero()) {
      v.holds_on_prefix = false;
      v.note = "a level has a zero middle gap, so no positive constant works;";
    }
    if (id == "yang") {
      if (v.bounded) v.aux_constant = aux;
      v.note = "best_constant is L, aux_constant is c;";
    }
    if (id == "hdim3") v.note += " not known to imply minimality;";
    return v;
  }

  const int M = ladder.m_k(depth);
  if (M > series.top()) throw std::invalid_argument("statistics do not cover m_depth");

  if (id == "thm3_c") {
    v.kind = ConditionKind::Constant;
    for (int m = 1; m <= M; ++m) {
      const LevelStats& st = series.at(m);
      LevelValue e;
      e.index = m;
      e.value = st.max_length / st.min_length;
      e.witness = st.max_block;
      v.series.push_back(std::move(e));
    }
    // The window counts spec levels: the maximum must be reached by m_{depth-window}.
    finish_constant(v, false, depth > options.window ? ladder.m_k(depth - options.window) - 1 : -1);
    return v;
  }

  if (id == "routine_c") {
    v.kind = ConditionKind::Density;
    const QSqrt2 alpha(options.alpha);
    std::int64_t count = 0;
    for (int m = 1; m <= M; ++m) {
      const auto& g = series.at(m).gamma;
      if (g && *g < alpha) ++count;
      LevelValue e;
      e.index = m;
      e.value = QSqrt2(mpq_class(count, m));
      v.series.push_back(std::move(e));
    }
    finish_density(v, options);
    v.note = "density of gamma_i < alpha; best_constant is its minimum over the window;";
    return v;
  }

  v.kind = ConditionKind::Limit;
  if (id == "routine_a" || id == "thm3_b") {
    QSqrt2 sum;
    for (int m = 1; m <= M; ++m) {
      const auto& b = series.at(m - 1).beta;
      if (b) sum += *b;
      LevelValue e;
      e.index = m;
      e.value = sum / QSqrt2(m);
      v.series.push_back(std::move(e));
    }
    v.note = "Cesaro mean of beta_j;";
  } else if (id == "routine_b") {
    Interval sum = Interval::point(0, options.prec);
    for (int m = 1; m <= M; ++m) {
      const auto& G = series.at(m - 1).Gamma;
      if (G) sum = sum + log_interval(*G, options.prec);
      LevelValue e;
      e.index = m;
      e.approx = to_approx(sum / Interval::point(m, options.prec), options.prec);
      v.series.push_back(std::move(e));
    }
    v.note = "Cesaro mean of log Gamma_j;";
  } else {  // thm3_a
    for (int m = 1; m <= M; ++m) {
      LevelValue e;
      e.index = m;
      Interval l2 = log_interval(series.at(m).lenF, options.prec) / Interval::ln2(options.prec);
      e.approx = to_approx(l2 / Interval::point(m, options.prec), options.prec);
      v.series.push_back(std::move(e));
    }
    v.note = "(1/m) log2 |F_m|;";
  }
  finish_limit(v, options);
  return v;
}

ConditionVerdict check_condition(const ConstructionSpec& spec, std::string_view id, int depth,
                                 const ConditionOptions& options) {
  if (depth < 3)
    throw std::invalid_argument("depth " + std::to_string(depth) +
                                " is too small: conditions are judged on at least 3 levels");
  if (depth + 1 > spec.max_depth())
    throw std::invalid_argument("depth " + std::to_string(depth) + " needs spec level " + std::to_string(depth + 1));
  RefinementLadder ladder = binary_refine(star_transform(spec, depth), depth);
  return check_condition(ladder, stats(ladder), id, depth, options);
}

namespace {

std::vector<LevelInequality> case_inequalities(const RefinementLadder& ladder, const QSqrt2& factor) {
  std::vector<LevelInequality> out;
  const ConstructionSpec& spec = ladder.star().base();
  for (int k = 1; k <= ladder.depth_k(); ++k) {
    LevelInequality row;
    row.k = k;
    const int mid = ladder.m_k(k - 1) + ladder.i_k(k) - 1;
    row.lhs = family_sizes(ladder, mid).total_length * factor;
    row.rhs = family_sizes(ladder, ladder.m_k(k - 1)).total_length;
    const auto& eta = ladder.star().eta_star(k);
    row.premise = eta.front() + eta.back() <= level_constants(spec, k).b;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

std::vector<LevelInequality> case_a_inequalities(const RefinementLadder& ladder, const QSqrt2& C) {
  return case_inequalities(ladder, QSqrt2(1) + C);
}

std::vector<LevelInequality> case_b_inequalities(const RefinementLadder& ladder, const QSqrt2& D) {
  return case_inequalities(ladder, QSqrt2(2) + D);
}

}  // namespace hps
