#include "hps/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hps {

std::string to_string(DimRatioSeries::Trend trend) {
  switch (trend) {
    case DimRatioSeries::Trend::Increasing: return "increasing";
    case DimRatioSeries::Trend::Decreasing: return "decreasing";
    case DimRatioSeries::Trend::Constant: return "constant";
    case DimRatioSeries::Trend::Mixed: return "mixed";
  }
  return "mixed";
}

namespace {

double width_of(const Interval& x) { return x.width().to_double(); }

// s_k at working precision `prec`, for k = 1..K.
std::vector<Interval> ratios(const StarredSpec& star, int K, long prec) {
  std::vector<Interval> out;
  Interval num = Interval::point(0, prec);
  for (int k = 1; k <= K; ++k) {
    num = num + log_interval(QSqrt2(star.n(k)), prec);
    const QSqrt2& d = star.delta(k);
    if (d >= QSqrt2(1)) throw std::logic_error("delta_" + std::to_string(k) + " >= 1: inconsistent spec");
    Interval den = -log_interval(d, prec);
    out.push_back(num / den);
  }
  return out;
}

}  // namespace

DimRatioSeries dim_ratio_sequence(const ConstructionSpec& spec, int K, long prec, double tolerance) {
  if (K < 1) throw std::invalid_argument("dim_ratio_sequence needs K >= 1");
  if (K + 1 > spec.max_depth())
    throw std::out_of_range("dim_ratio_sequence needs spec level K+1 = " + std::to_string(K + 1));
  if (prec < 16) throw std::invalid_argument("precision must be at least 16 bits");
  const StarredSpec star = star_transform(spec, K);

  DimRatioSeries out;
  long work = prec;
  for (;; work *= 2) {
    out.s = ratios(star, K, work);
    bool tight = true;
    for (const Interval& x : out.s) tight = tight && width_of(x) <= tolerance;
    if (tight) break;
    if (work > 64 * prec) throw std::runtime_error("dimension ratios could not be certified to the tolerance");
  }
  out.precision_used = work;
  for (const Interval& x : out.s) out.value.push_back(to_approx(x, prec));

  out.tail_min.assign(static_cast<std::size_t>(K), 0);
  double running = std::numeric_limits<double>::infinity();
  for (int k = K; k >= 1; --k) {
    running = std::min(running, out.at(k));
    out.tail_min[static_cast<std::size_t>(k - 1)] = running;
  }
  out.liminf_prefix = out.tail_min[static_cast<std::size_t>((K - 1) / 2)];

  // Trend over the last five terms; steps within the tolerance count as flat.
  const int from = std::max(1, K - 4);
  bool up = false, down = false;
  for (int k = from + 1; k <= K; ++k) {
    const double step = out.at(k) - out.at(k - 1);
    if (step > tolerance) up = true;
    else if (step < -tolerance) down = true;
  }
  out.trend = up && down ? DimRatioSeries::Trend::Mixed
              : up       ? DimRatioSeries::Trend::Increasing
              : down     ? DimRatioSeries::Trend::Decreasing
                         : DimRatioSeries::Trend::Constant;
  return out;
}

namespace {

mpq_class exact_rational(const BigFloat& x) {
  mpq_class q;
  mpfr_get_q(q.get_mpq_t(), x.get());
  return q;
}

mpz_class floor_q(const mpq_class& q) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

mpz_class ceil_q(const mpq_class& q) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

// floor(x / s) for the lower end, rounded outward when x is only enclosed.
mpz_class floor_cell(const CertifiedReal& x, const mpq_class& s) {
  if (x.is_exact()) return (*x.exact() / QSqrt2(s)).floor();
  return floor_q(exact_rational(x.enclosure().lo()) / s);
}

// ceil(x / s) for the upper end.
mpz_class ceil_cell(const CertifiedReal& x, const mpq_class& s) {
  if (x.is_exact()) return -((-*x.exact()) / QSqrt2(s)).floor();
  return ceil_q(exact_rational(x.enclosure().hi()) / s);
}

bool is_point(const BoxItem& item) {
  if (item.left.is_exact() && item.right.is_exact()) return *item.left.exact() == *item.right.exact();
  return false;
}

}  // namespace

BoxCountResult box_count(const std::vector<BoxItem>& items, const std::vector<mpq_class>& scales) {
  if (items.empty()) throw std::invalid_argument("box_count: empty input");
  if (scales.empty()) throw std::invalid_argument("box_count: no scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (sgn(scales[i]) <= 0) throw std::invalid_argument("box_count: scales must be positive");
    if (i > 0 && scales[i] >= scales[i - 1]) throw std::invalid_argument("box_count: scales must decrease");
  }

  BoxCountResult out;
  out.scales = scales;
  std::vector<std::pair<mpz_class, mpz_class>> cells;
  cells.reserve(items.size());
  for (const mpq_class& s : scales) {
    cells.clear();
    for (const BoxItem& item : items) {
      mpz_class lo = floor_cell(item.left, s);
      mpz_class hi;
      if (is_point(item)) {
        hi = lo;
      } else {
        hi = ceil_cell(item.right, s) - 1;
        if (hi < lo) hi = lo;  // enclosure narrower than a cell boundary step
      }
      cells.emplace_back(std::move(lo), std::move(hi));
    }
    std::sort(cells.begin(), cells.end());
    mpz_class count = 0;
    mpz_class cur_lo = cells.front().first, cur_hi = cells.front().second;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (cells[i].first <= cur_hi + 1) {
        if (cells[i].second > cur_hi) cur_hi = cells[i].second;
      } else {
        count += cur_hi - cur_lo + 1;
        cur_lo = cells[i].first;
        cur_hi = cells[i].second;
      }
    }
    count += cur_hi - cur_lo + 1;
    out.counts.push_back(count);
  }

  // Least squares on (log 1/s, log N).
  const std::size_t n = scales.size();
  if (n >= 2) {
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = -std::log(scales[i].get_d());
      y[i] = std::log(out.counts[i].get_d());
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    out.fitted_slope = sxy / sxx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (my + out.fitted_slope * (x[i] - mx));
      ss += r * r;
    }
    out.residual = std::sqrt(ss / static_cast<double>(n));
  }
  return out;
}

std::vector<BoxItem> box_items(const std::vector<BasicInterval>& intervals) {
  std::vector<BoxItem> out;
  out.reserve(intervals.size());
  for (const BasicInterval& b : intervals) out.push_back({CertifiedReal(b.left), CertifiedReal(b.right)});
  return out;
}

std::vector<BoxItem> box_items(const IntervalTree& tree, int level) {
  std::vector<BoxItem> out;
  const auto& row = tree.levels.at(static_cast<std::size_t>(level));
  out.reserve(row.size());
  for (const auto& node : row) out.push_back({node.left, node.right});
  return out;
}

std::vector<BoxItem> endpoint_items(const std::vector<BasicInterval>& intervals) {
  std::vector<BoxItem> out;
  out.reserve(2 * intervals.size());
  for (const BasicInterval& b : intervals) {
    out.push_back({CertifiedReal(b.left), CertifiedReal(b.left)});
    out.push_back({CertifiedReal(b.right), CertifiedReal(b.right)});
  }
  return out;
}

std::vector<mpq_class> geometric_scales(const mpq_class& base, int from, int to) {
  if (sgn(base) <= 0 || base >= 1) throw std::invalid_argument("scale base must lie in (0, 1)");
  if (from < 0 || to < from) throw std::invalid_argument("bad scale exponent range");
  std::vector<mpq_class> out;
  mpq_class s = 1;
  for (int j = 0; j <= to; ++j) {
    if (j >= from) out.push_back(s);
    s *= base;
  }
  return out;
}

std::string to_csv(const DimRatioSeries& series) {
  std::ostringstream os;
  os << "k,s_k\n";
  for (int k = 1; k <= series.size(); ++k)
    os << k << ',' << series.value[static_cast<std::size_t>(k - 1)].value.to_decimal(30) << '\n';
  return os.str();
}

std::string to_csv(const BoxCountResult& result) {
  std::ostringstream os;
  os << "scale,count\n";
  for (std::size_t i = 0; i < result.scales.size(); ++i)
    os << result.scales[i].get_str() << ',' << result.counts[i].get_str() << '\n';
  return os.str();
}

}  // namespace hps
