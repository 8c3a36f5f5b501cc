#include "hps/qsmap.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hps {

namespace {

const char* kMapGrammar = "expected identity | pow:ALPHA | pwl:x1,y1;x2,y2;... | comp:F+G+...";

mpq_class exact_rational(const BigFloat& x) {
  mpq_class q;
  mpfr_get_q(q.get_mpq_t(), x.get());
  return q;
}

// Keep an enclosure inside [0, 1], where every map is defined.
Interval clamp_unit(const Interval& x) {
  BigFloat lo = x.lo(), hi = x.hi();
  if (lo.sign() < 0) mpfr_set_zero(lo.get(), 1);
  if (mpfr_cmp_ui(hi.get(), 1) > 0) mpfr_set_ui(hi.get(), 1, MPFR_RNDU);
  if (compare(lo, hi) > 0) lo = hi;
  return Interval(std::move(lo), std::move(hi));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

QsMap QsMap::identity() { return QsMap(); }

QsMap QsMap::power(const mpq_class& alpha) {
  if (sgn(alpha) <= 0) throw std::invalid_argument("pow: exponent must be positive");
  QsMap m;
  m.kind_ = Kind::Power;
  m.alpha_ = alpha;
  return m;
}

QsMap QsMap::piecewise_linear(std::vector<std::pair<mpq_class, mpq_class>> breakpoints) {
  if (breakpoints.empty() || breakpoints.front().first != 0) breakpoints.insert(breakpoints.begin(), {0, 0});
  if (breakpoints.back().first != 1) breakpoints.emplace_back(1, 1);
  if (breakpoints.front().second != 0 || breakpoints.back().second != 1)
    throw std::invalid_argument("pwl: the map must fix 0 and 1");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i].first <= breakpoints[i - 1].first || breakpoints[i].second <= breakpoints[i - 1].second)
      throw std::invalid_argument("pwl: breakpoints must increase strictly in both coordinates");
    if (breakpoints[i].first > 1 || breakpoints[i].second > 1)
      throw std::invalid_argument("pwl: breakpoints must lie in [0,1]^2");
  }
  QsMap m;
  m.kind_ = Kind::PiecewiseLinear;
  m.points_ = std::move(breakpoints);
  return m;
}

QsMap QsMap::compose(const QsMap& first, const QsMap& second) {
  QsMap m;
  m.kind_ = Kind::Composition;
  for (const QsMap* part : {&first, &second}) {
    if (part->kind_ == Kind::Composition)
      m.parts_.insert(m.parts_.end(), part->parts_.begin(), part->parts_.end());
    else
      m.parts_.push_back(*part);
  }
  return m;
}

mpq_class QsMap::slope_ratio() const {
  if (kind_ == Kind::Composition) {
    mpq_class r = 1;
    for (const QsMap& p : parts_) r *= p.slope_ratio();
    return r;
  }
  if (kind_ != Kind::PiecewiseLinear) return 1;
  mpq_class lo, hi;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    mpq_class s = (points_[i].second - points_[i - 1].second) / (points_[i].first - points_[i - 1].first);
    if (i == 1 || s < lo) lo = s;
    if (i == 1 || s > hi) hi = s;
  }
  return hi / lo;
}

CertifiedReal QsMap::apply(const CertifiedReal& x) const {
  switch (kind_) {
    case Kind::Identity: return x;
    case Kind::Power:
      if (x.is_exact()) {
        if (x.exact()->sign() < 0 || *x.exact() > QSqrt2(1)) throw std::domain_error("map argument outside [0,1]");
        return pow(x, alpha_);
      }
      return CertifiedReal(apply(x.enclosure()));
    case Kind::PiecewiseLinear: {
      if (!x.is_exact()) return CertifiedReal(apply(x.enclosure()));
      const QSqrt2& v = *x.exact();
      if (v.sign() < 0 || v > QSqrt2(1)) throw std::domain_error("map argument outside [0,1]");
      std::size_t i = 1;
      while (i + 1 < points_.size() && v > QSqrt2(points_[i].first)) ++i;
      const auto& [x0, y0] = points_[i - 1];
      const auto& [x1, y1] = points_[i];
      const mpq_class slope = (y1 - y0) / (x1 - x0);
      return CertifiedReal(QSqrt2(y0) + QSqrt2(slope) * (v - QSqrt2(x0)), x.enclosure().precision());
    }
    case Kind::Composition: {
      CertifiedReal y = x;
      for (const QsMap& p : parts_) y = p.apply(y);
      return y;
    }
  }
  return x;
}

Interval QsMap::apply(const Interval& x) const {
  const Interval u = clamp_unit(x);
  switch (kind_) {
    case Kind::Identity: return u;
    case Kind::Power: return pow(u, alpha_);
    case Kind::PiecewiseLinear: {
      auto eval = [this](const mpq_class& v) {
        std::size_t i = 1;
        while (i + 1 < points_.size() && v > points_[i].first) ++i;
        const auto& [x0, y0] = points_[i - 1];
        const auto& [x1, y1] = points_[i];
        return mpq_class(y0 + (y1 - y0) / (x1 - x0) * (v - x0));
      };
      const long prec = u.precision();
      Interval lo = Interval::from_rational(eval(exact_rational(u.lo())), prec);
      Interval hi = Interval::from_rational(eval(exact_rational(u.hi())), prec);
      return Interval(lo.lo(), hi.hi());
    }
    case Kind::Composition: {
      Interval y = u;
      for (const QsMap& p : parts_) y = p.apply(y);
      return y;
    }
  }
  return u;
}

double QsMap::apply(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  switch (kind_) {
    case Kind::Identity: return x;
    case Kind::Power: return std::pow(x, alpha_.get_d());
    case Kind::PiecewiseLinear: {
      std::size_t i = 1;
      while (i + 1 < points_.size() && x > points_[i].first.get_d()) ++i;
      const double x0 = points_[i - 1].first.get_d(), y0 = points_[i - 1].second.get_d();
      const double x1 = points_[i].first.get_d(), y1 = points_[i].second.get_d();
      return y0 + (y1 - y0) / (x1 - x0) * (x - x0);
    }
    case Kind::Composition:
      for (const QsMap& p : parts_) x = p.apply(x);
      return x;
  }
  return x;
}

std::string QsMap::describe() const {
  switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::Power: return "pow:" + alpha_.get_str();
    case Kind::PiecewiseLinear: {
      std::ostringstream os;
      os << "pwl:";
      bool first = true;
      for (std::size_t i = 1; i + 1 < points_.size(); ++i) {
        if (!first) os << ';';
        os << points_[i].first.get_str() << ',' << points_[i].second.get_str();
        first = false;
      }
      return os.str();
    }
    case Kind::Composition: {
      std::string out = "comp:";
      for (std::size_t i = 0; i < parts_.size(); ++i) out += (i ? "+" : "") + parts_[i].describe();
      return out;
    }
  }
  return "identity";
}

QsMap parse_map(std::string_view descriptor) {
  const auto colon = descriptor.find(':');
  const std::string_view head = descriptor.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view() : descriptor.substr(colon + 1);
  try {
    if (head == "identity" && colon == std::string_view::npos) return QsMap::identity();
    if (head == "pow" && !rest.empty()) return QsMap::power(QSqrt2::parse_rational(rest));
    if (head == "pwl") {
      std::vector<std::pair<mpq_class, mpq_class>> points;
      if (!rest.empty()) {
        for (const std::string& item : split(rest, ';')) {
          auto xy = split(item, ',');
          if (xy.size() != 2) throw std::invalid_argument("pwl: breakpoint '" + item + "' is not x,y");
          points.emplace_back(QSqrt2::parse_rational(xy[0]), QSqrt2::parse_rational(xy[1]));
        }
      }
      return QsMap::piecewise_linear(std::move(points));
    }
    if (head == "comp" && !rest.empty()) {
      auto parts = split(rest, '+');
      QsMap out = parse_map(parts[0]);
      for (std::size_t i = 1; i < parts.size(); ++i) out = QsMap::compose(out, parse_map(parts[i]));
      return out;
    }
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("bad map descriptor '" + std::string(descriptor) + "': " + e.what());
  }
  throw std::invalid_argument("bad map descriptor '" + std::string(descriptor) + "': " + kMapGrammar);
}

std::vector<ImageInterval> apply_map(const QsMap& map, const std::vector<BasicInterval>& intervals, long prec) {
  std::vector<ImageInterval> out;
  out.reserve(intervals.size());
  for (const BasicInterval& b : intervals) {
    if (b.left.sign() < 0 || b.right > QSqrt2(1) || b.right < b.left)
      throw std::invalid_argument("apply_map: interval outside [0,1]");
    out.push_back({map.apply(CertifiedReal(b.left, prec)), map.apply(CertifiedReal(b.right, prec))});
  }
  return out;
}

IntervalTree apply_map(const QsMap& map, const IntervalTree& tree) {
  IntervalTree out = tree;
  for (auto& level : out.levels)
    for (auto& node : level) {
      node.left = map.apply(node.left);
      node.right = map.apply(node.right);
    }
  return out;
}

std::vector<NestedPair> nested_pairs(const IntervalTree& tree, int max_level) {
  std::vector<NestedPair> out;
  const int top = std::min(max_level, tree.depth());
  for (int level = 1; level <= top; ++level) {
    const auto& row = tree.levels[static_cast<std::size_t>(level)];
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::int64_t up = row[i].parent;
      for (int a = level - 1; a >= 0; --a) {
        out.push_back({a, up, level, static_cast<std::int64_t>(i)});
        up = tree.levels[static_cast<std::size_t>(a)][static_cast<std::size_t>(up)].parent;
      }
    }
  }
  return out;
}

std::vector<NestedPair> sample_pairs(const IntervalTree& tree, std::size_t count, std::uint64_t seed) {
  if (tree.depth() < 1) throw std::invalid_argument("sample_pairs needs a tree of depth >= 1");
  std::mt19937_64 rng(seed);
  std::vector<NestedPair> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const int level = std::uniform_int_distribution<int>(1, tree.depth())(rng);
    const auto& row = tree.levels[static_cast<std::size_t>(level)];
    const auto idx = std::uniform_int_distribution<std::size_t>(0, row.size() - 1)(rng);
    const int outer = std::uniform_int_distribution<int>(0, level - 1)(rng);
    std::int64_t up = static_cast<std::int64_t>(idx);
    for (int a = level; a > outer; --a)
      up = tree.levels[static_cast<std::size_t>(a)][static_cast<std::size_t>(up)].parent;
    out.push_back({outer, up, level, static_cast<std::int64_t>(idx)});
  }
  return out;
}

CertifiedReal distortion_ratio(const QsMap& map, const CertifiedReal& I_left, const CertifiedReal& I_right,
                               const CertifiedReal& J_left, const CertifiedReal& J_right) {
  return (map.apply(J_right) - map.apply(J_left)) / (map.apply(I_right) - map.apply(I_left));
}

namespace {

struct Sample {
  double x;
  double y;
};

std::vector<Sample> samples(const QsMap& map, const IntervalTree& tree, const std::vector<NestedPair>& pairs) {
  std::vector<Sample> out;
  out.reserve(pairs.size());
  for (const NestedPair& p : pairs) {
    const auto& I = tree.levels.at(static_cast<std::size_t>(p.outer_level)).at(static_cast<std::size_t>(p.outer));
    const auto& J = tree.levels.at(static_cast<std::size_t>(p.inner_level)).at(static_cast<std::size_t>(p.inner));
    const double x = (J.length() / I.length()).to_double();
    const double y = distortion_ratio(map, I.left, I.right, J.left, J.right).to_double();
    out.push_back({x, y});
  }
  return out;
}

bool informative(const Sample& s) { return s.x > 0 && s.x < 1 && s.y > 0; }

}  // namespace

DistortionProfile fit_distortion(const QsMap& map, const IntervalTree& tree, const std::vector<NestedPair>& train,
                                 const std::vector<NestedPair>& heldout) {
  if (train.size() < 100) throw std::invalid_argument("fit_distortion needs at least 100 training pairs");
  DistortionProfile out;
  out.sample_count = train.size();
  out.heldout_count = heldout.size();

  const auto fit = samples(map, tree, train);
  double smin = 0, smax = 0;
  bool any = false, all_equal = true;
  Sample first{0, 0};
  for (const Sample& s : fit) {
    if (!informative(s)) continue;
    const double slope = std::log(s.y) / std::log(s.x);
    if (!any) {
      smin = smax = slope;
      first = s;
    } else {
      smin = std::min(smin, slope);
      smax = std::max(smax, slope);
      all_equal = all_equal && s.x == first.x && s.y == first.y;
    }
    any = true;
  }
  if (!any || all_equal) {
    out.degenerate = true;
    out.p_hat = out.q_hat = 1;
  } else {
    out.p_hat = std::min(1.0, smin);
    out.q_hat = std::max(1.0, smax);
  }
  out.lambda_hat = 1;
  for (const Sample& s : fit)
    if (informative(s)) out.lambda_hat = std::min(out.lambda_hat, s.y / std::pow(s.x, out.q_hat));

  constexpr double kSlack = 1e-12;  // rounding of the double-valued ratios
  for (const Sample& s : samples(map, tree, heldout)) {
    if (!informative(s)) continue;
    const double upper = s.y / (4 * std::pow(s.x, out.p_hat)) - 1;
    const double lower = out.lambda_hat * std::pow(s.x, out.q_hat) / s.y - 1;
    const double excess = std::max(upper, lower);
    if (excess > kSlack) {
      ++out.violations;
      out.max_violation = std::max(out.max_violation, excess);
    }
  }
  return out;
}

double triple_ratio_bound(const QsMap& map, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = unit(rng);
    const double t = unit(rng) * std::min(x, 1 - x);
    if (t <= 0) continue;
    const double right = map.apply(x + t) - map.apply(x);
    const double left = map.apply(x) - map.apply(x - t);
    if (right <= 0 || left <= 0) continue;
    worst = std::max({worst, right / left, left / right});
  }
  return worst;
}

BoxCountResult image_box_dim(const QsMap& map, const ConstructionSpec& spec, int depth,
                             const std::vector<mpq_class>& scales, std::uint64_t cap, long prec) {
  const auto images = apply_map(map, enumerate_level(spec, depth, cap), prec);
  std::vector<BoxItem> items;
  items.reserve(images.size());
  for (const ImageInterval& im : images) items.push_back({im.left, im.right});
  return box_count(items, scales);
}

}  // namespace hps
