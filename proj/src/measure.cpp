#include "hps/measure.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hps {

namespace {

std::string node_name(int level, std::size_t index) {
  return "level " + std::to_string(level) + " node " + std::to_string(index);
}

bool certainly_positive(const CertifiedReal& x) {
  if (x.is_exact()) return x.exact()->sign() > 0;
  return x.enclosure().positive();
}

double upper_double(const CertifiedReal& x) {
  return x.is_exact() ? x.exact()->to_double() : x.enclosure().hi().to_double();
}

bool inside(const IntervalTree::Node& node, const Segment& U) {
  return certainly_leq(U.left, node.left) && certainly_leq(node.right, U.right);
}

// Index range [first, last) of the level nodes that may meet U (nodes are in order).
std::pair<std::size_t, std::size_t> meeting_range(const std::vector<IntervalTree::Node>& row, const Segment& U) {
  auto first = std::partition_point(row.begin(), row.end(),
                                    [&](const IntervalTree::Node& n) { return certainly_less(n.right, U.left); });
  auto last = std::partition_point(first, row.end(),
                                   [&](const IntervalTree::Node& n) { return !certainly_less(U.right, n.left); });
  return {static_cast<std::size_t>(first - row.begin()), static_cast<std::size_t>(last - row.begin())};
}

int resolve_depth(const MassDistribution& mu, int depth) {
  const int level = depth < 0 ? mu.depth() : depth;
  if (level > mu.depth()) throw std::out_of_range("measure depth " + std::to_string(level) + " exceeds the tree");
  return level;
}

}  // namespace

MassDistribution build_measure(const IntervalTree& tree, const mpq_class& d, long prec) {
  if (sgn(d) <= 0 || d >= 1) throw std::invalid_argument("measure exponent d must lie in (0, 1)");
  if (tree.levels.empty() || tree.levels[0].size() != 1) throw std::invalid_argument("measure needs a single root");

  MassDistribution mu;
  mu.d = d;
  mu.tree = tree;
  const int M = tree.depth();
  mu.weight.resize(tree.levels.size());
  mu.c_d.resize(static_cast<std::size_t>(M));
  mu.c_1.resize(static_cast<std::size_t>(M));
  mu.weight[0] = {CertifiedReal(QSqrt2(1), prec)};
  for (std::size_t k = 1; k < tree.levels.size(); ++k) mu.weight[k].resize(tree.levels[k].size());

  for (int l = 0; l < M; ++l) {
    const auto& row = tree.levels[static_cast<std::size_t>(l)];
    const auto& below = tree.levels[static_cast<std::size_t>(l + 1)];
    auto& cd = mu.c_d[static_cast<std::size_t>(l)];
    auto& c1 = mu.c_1[static_cast<std::size_t>(l)];
    cd.resize(row.size());
    c1.resize(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& node = row[i];
      if (node.children.empty()) throw std::domain_error(node_name(l, i) + " has no children above the tree depth");
      std::vector<CertifiedReal> lengths;
      lengths.reserve(node.children.size());
      std::size_t ref = 0;
      for (std::int64_t c : node.children) {
        CertifiedReal len = below[static_cast<std::size_t>(c)].length();
        if (!certainly_positive(len))
          throw std::domain_error("zero-length child " + node_name(l + 1, static_cast<std::size_t>(c)) + " of " +
                                  node_name(l, i));
        if (!lengths.empty() && len.to_double() > lengths[ref].to_double()) ref = lengths.size();
        lengths.push_back(std::move(len));
      }
      // Ratios to the longest child keep equal splits exact even when |J|^d is irrational.
      std::vector<CertifiedReal> rho;
      rho.reserve(lengths.size());
      CertifiedReal total(QSqrt2(0), prec);
      CertifiedReal sum_d(QSqrt2(0), prec), sum_1(QSqrt2(0), prec);
      for (const CertifiedReal& len : lengths) {
        rho.push_back(pow(len / lengths[ref], d));
        total = total + rho.back();
        sum_d = sum_d + pow(len, d);
        sum_1 = sum_1 + len;
      }
      cd[i] = sum_d;
      c1[i] = sum_1;
      const CertifiedReal& w = mu.weight[static_cast<std::size_t>(l)][i];
      for (std::size_t j = 0; j < rho.size(); ++j)
        mu.weight[static_cast<std::size_t>(l + 1)][static_cast<std::size_t>(node.children[j])] = w * rho[j] / total;
    }
  }
  return mu;
}

ConservationReport check_conservation(const MassDistribution& mu) {
  ConservationReport out;
  for (int l = 0; l < mu.depth(); ++l) {
    const auto& row = mu.tree.levels[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < row.size(); ++i) {
      const CertifiedReal& parent = mu.weight[static_cast<std::size_t>(l)][i];
      CertifiedReal sum(QSqrt2(0));
      for (std::int64_t c : row[i].children) sum = sum + mu.mu(l + 1, c);
      ++out.nodes;
      if (sum.is_exact() && parent.is_exact()) {
        ++out.exact_nodes;
        if (*sum.exact() != *parent.exact()) ++out.failures;
        continue;
      }
      if (!sum.enclosure().overlaps(parent.enclosure())) ++out.failures;
      out.max_width = std::max(out.max_width, sum.enclosure().width().to_double());
    }
  }
  return out;
}

NormalizerReport check_normalizers(const MassDistribution& mu) {
  NormalizerReport out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < mu.c_d.size(); ++l) {
    for (std::size_t i = 0; i < mu.c_d[l].size(); ++i) {
      const CertifiedReal rhs = pow(mu.c_1[l][i], mu.d);
      ++out.nodes;
      if (!certainly_leq(rhs, mu.c_d[l][i])) ++out.violations;
      out.min_ratio = std::min(out.min_ratio, (mu.c_d[l][i] / rhs).to_double());
    }
  }
  if (out.nodes == 0) out.min_ratio = 1;
  return out;
}

MeasureBounds measure_of_interval(const MassDistribution& mu, const Segment& U, int depth) {
  const int level = resolve_depth(mu, depth);
  const auto& row = mu.tree.levels[static_cast<std::size_t>(level)];
  MeasureBounds out{CertifiedReal(QSqrt2(0)), CertifiedReal(QSqrt2(0))};
  CertifiedReal boundary(QSqrt2(0));
  const auto [first, last] = meeting_range(row, U);
  for (std::size_t i = first; i < last; ++i) {
    const CertifiedReal& w = mu.weight[static_cast<std::size_t>(level)][i];
    if (inside(row[i], U)) out.lower = out.lower + w;
    else boundary = boundary + w;
  }
  out.upper = out.lower + boundary;
  return out;
}

HolderResult holder_diagnostic(const MassDistribution& mu, const std::vector<Segment>& sample, int depth) {
  if (sample.empty()) throw std::invalid_argument("holder_diagnostic: empty sample");
  HolderResult out;
  out.ratios.reserve(sample.size());
  for (std::size_t s = 0; s < sample.size(); ++s) {
    const Segment& U = sample[s];
    const CertifiedReal len = U.right - U.left;
    if (!certainly_positive(len)) throw std::invalid_argument("holder_diagnostic: degenerate segment");
    const double r = upper_double(measure_of_interval(mu, U, depth).upper / pow(len, mu.d));
    out.ratios.push_back(r);
    if (s == 0 || r > out.max_ratio) {
      out.max_ratio = r;
      out.argmax = s;
    }
  }
  return out;
}

std::vector<Segment> level_segments(const IntervalTree& tree, int level) {
  std::vector<Segment> out;
  const auto& row = tree.levels.at(static_cast<std::size_t>(level));
  out.reserve(row.size());
  for (const auto& node : row) out.push_back({node.left, node.right});
  return out;
}

std::vector<std::int64_t> phi_cover(const IntervalTree& tree, const Segment& U, int level) {
  const auto& row = tree.levels.at(static_cast<std::size_t>(level));
  std::vector<std::int64_t> out;
  const auto [first, last] = meeting_range(row, U);
  for (std::size_t i = first; i < last; ++i) {
    if (!inside(row[i], U)) continue;
    if (level > 0) {
      const auto& parent = tree.levels[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(row[i].parent)];
      if (inside(parent, U)) continue;
    }
    out.push_back(static_cast<std::int64_t>(i));
  }
  return out;
}

std::vector<Segment> random_segments(const IntervalTree& tree, std::size_t count, std::uint64_t seed) {
  const auto& root = tree.levels.at(0).at(0);
  const CertifiedReal span = root.length();
  std::mt19937_64 rng(seed);
  const mpz_class denom = mpz_class(1) << 40;
  auto draw = [&] {
    mpz_class k(static_cast<unsigned long>(rng() >> 24));
    return mpq_class(k, denom);
  };
  std::vector<Segment> out;
  out.reserve(count);
  while (out.size() < count) {
    mpq_class a = draw(), b = draw();
    a.canonicalize();
    b.canonicalize();
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    out.push_back({root.left + span * CertifiedReal(QSqrt2(a)), root.left + span * CertifiedReal(QSqrt2(b))});
  }
  return out;
}

std::string holder_csv(const MassDistribution& mu) {
  std::ostringstream os;
  os.precision(17);
  os << "level,max_ratio\n";
  for (int l = 0; l <= mu.depth(); ++l) {
    const HolderResult h = holder_diagnostic(mu, level_segments(mu.tree, l), l);
    os << l << ',' << h.max_ratio << '\n';
  }
  return os.str();
}

}  // namespace hps
