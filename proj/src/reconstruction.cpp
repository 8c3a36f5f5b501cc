#include "hps/reconstruction.hpp"

#include <stdexcept>

namespace hps {

const QSqrt2& StarredSpec::delta(int k) const {
  if (k < 0 || k > depth_) throw std::out_of_range("delta index outside [0, depth]");
  return delta_[static_cast<std::size_t>(k)];
}

QSqrt2 StarredSpec::c_star(int k) const {
  if (k < 1 || k > depth_) throw std::out_of_range("c* index outside [1, depth]");
  return delta_[static_cast<std::size_t>(k)] / delta_[static_cast<std::size_t>(k - 1)];
}

const std::vector<QSqrt2>& StarredSpec::eta_star(int k) const {
  if (k < 1 || k > depth_) throw std::out_of_range("eta* level outside [1, depth]");
  return eta_star_[static_cast<std::size_t>(k - 1)];
}

StarredSpec star_transform(const ConstructionSpec& spec, int depth) {
  if (depth < 0) depth = spec.max_depth() - 1;
  if (depth < 0 || depth > spec.max_depth() - 1)
    throw std::out_of_range("starred depth must be at most max_depth - 1");
  StarredSpec out(spec);
  out.depth_ = depth;
  const Level& first = spec.level(1);
  out.root_left_ = first.eta.front();
  out.root_right_ = QSqrt2(1) - first.eta.back();
  for (int k = 0; k <= depth; ++k) {
    const Level& next = spec.level(k + 1);
    QSqrt2 d = QSqrt2(next.n) * next.product;
    for (std::int64_t l = 1; l < next.n; ++l) d += next.eta[static_cast<std::size_t>(l)];
    if (d.sign() <= 0) throw std::invalid_argument("delta_" + std::to_string(k) + " is not positive");
    out.delta_.push_back(std::move(d));
  }
  for (int k = 1; k <= depth; ++k) {
    const Level& lv = spec.level(k);
    const Level& next = spec.level(k + 1);
    const QSqrt2& left = next.eta.front();
    const QSqrt2& right = next.eta.back();
    const QSqrt2 edge = left + right;
    std::vector<QSqrt2> row;
    row.reserve(lv.eta.size());
    row.push_back(left);
    for (std::int64_t l = 1; l < lv.n; ++l) row.push_back(edge + lv.eta[static_cast<std::size_t>(l)]);
    row.push_back(right);
    out.eta_star_.push_back(std::move(row));
  }
  return out;
}

std::vector<BasicInterval> enumerate_starred(const StarredSpec& star, int k, std::uint64_t cap) {
  if (k < 0 || k > star.depth()) throw std::out_of_range("starred level outside [0, depth]");
  mpz_class total = star.base().count(k);
  if (total > mpz_class(std::to_string(cap), 10)) throw EnumerationTooLarge(total, cap);
  std::vector<BasicInterval> current;
  current.push_back({0, {}, star.root_left(), star.root_right()});
  for (int j = 1; j <= k; ++j) {
    const auto& gaps = star.eta_star(j);
    const QSqrt2& len = star.delta(j);
    const std::int64_t n = star.n(j);
    std::vector<BasicInterval> next;
    next.reserve(current.size() * static_cast<std::size_t>(n));
    for (const BasicInterval& parent : current) {
      QSqrt2 x = parent.left + gaps[0];
      for (std::int64_t i = 1; i <= n; ++i) {
        BasicInterval child{j, parent.index, x, x + len};
        child.index.push_back(i);
        x = child.right + gaps[static_cast<std::size_t>(i)];
        next.push_back(std::move(child));
      }
    }
    current = std::move(next);
  }
  return current;
}

int ladder_exponent(std::int64_t n) {
  if (n < 2) throw std::invalid_argument("ladder needs at least two children");
  int i = 0;
  while ((std::int64_t{2} << i) <= n) ++i;
  return i;
}

const RefinementLadder::Scheme& RefinementLadder::scheme(int k) const {
  if (k < 1 || k > depth_k()) throw std::out_of_range("ladder scheme outside [1, depth_k]");
  return schemes_[static_cast<std::size_t>(k - 1)];
}

const std::vector<Block>& RefinementLadder::stage(int k, int s) const {
  const Scheme& sc = scheme(k);
  if (s < 0 || s > sc.i) throw std::out_of_range("ladder stage outside [0, i_k]");
  return sc.stages[static_cast<std::size_t>(s)];
}

LadderLevel RefinementLadder::level(int m) const {
  if (m < 0 || m > top()) throw std::out_of_range("ladder level outside [0, top]");
  int k = 1;
  while (k < depth_k() && m >= m_[static_cast<std::size_t>(k)]) ++k;
  const Scheme& sc = scheme(k);
  LadderLevel out;
  out.m = m;
  out.k = k;
  out.stage = m - m_[static_cast<std::size_t>(k - 1)];
  out.multiplicity = sc.multiplicity;
  out.blocks = &sc.stages[static_cast<std::size_t>(out.stage)];
  return out;
}

std::vector<std::int64_t> RefinementLadder::children(int k, int s, std::int64_t parent) const {
  const auto& blocks = stage(k, s);
  std::vector<std::int64_t> out;
  // Children of one parent are contiguous and ordered; locate them by span.
  const Block& p = stage(k, s - 1).at(static_cast<std::size_t>(parent));
  std::int64_t lo = 0, hi = static_cast<std::int64_t>(blocks.size());
  while (lo < hi) {
    std::int64_t mid = (lo + hi) / 2;
    if (blocks[static_cast<std::size_t>(mid)].last < p.first) lo = mid + 1;
    else hi = mid;
  }
  for (std::int64_t i = lo; i < static_cast<std::int64_t>(blocks.size()) &&
                            blocks[static_cast<std::size_t>(i)].first <= p.last;
       ++i)
    out.push_back(i);
  return out;
}

QSqrt2 RefinementLadder::gap_sum(int k, std::int64_t a, std::int64_t b) const {
  const Scheme& sc = scheme(k);
  return sc.prefix[static_cast<std::size_t>(b - 1)] - sc.prefix[static_cast<std::size_t>(a - 1)];
}

QSqrt2 RefinementLadder::child_offset(int k, std::int64_t a) const {
  return star_.eta_star(k)[0] + QSqrt2(a - 1) * star_.delta(k) + gap_sum(k, 1, a);
}

std::vector<std::pair<std::int64_t, QSqrt2>> RefinementLadder::contained_gaps(int k, int s, std::int64_t idx) const {
  const Scheme& sc = scheme(k);
  if (s >= sc.i) return {};
  const Block& b = stage(k, s).at(static_cast<std::size_t>(idx));
  const auto& eta = star_.eta_star(k);
  std::vector<std::pair<std::int64_t, QSqrt2>> out;
  if (s == 0) out.emplace_back(0, eta.front());
  for (std::int64_t c : children(k, s + 1, idx)) {
    const Block& child = stage(k, s + 1)[static_cast<std::size_t>(c)];
    if (child.last < b.last) out.emplace_back(child.last, eta[static_cast<std::size_t>(child.last)]);
  }
  if (s == 0) out.emplace_back(star_.n(k), eta.back());
  return out;
}

RefinementLadder binary_refine(const StarredSpec& star, int depth_k) {
  if (depth_k < 0) depth_k = star.depth();
  if (depth_k < 1 || depth_k > star.depth()) throw std::out_of_range("ladder depth outside [1, starred depth]");
  RefinementLadder ladder(star);
  ladder.m_.push_back(0);
  std::uint64_t stored = 0;
  mpz_class multiplicity = 1;
  for (int k = 1; k <= depth_k; ++k) {
    RefinementLadder::Scheme sc;
    sc.k = k;
    const std::int64_t n = star.n(k);
    sc.i = ladder_exponent(n);
    sc.multiplicity = multiplicity;
    stored += static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(sc.i + 1);
    if (stored > kMaxPatternBlocks)
      throw EnumerationTooLarge(mpz_class(std::to_string(stored), 10), kMaxPatternBlocks);
    const auto& eta = star.eta_star(k);
    const QSqrt2& dk = star.delta(k);
    sc.prefix.reserve(static_cast<std::size_t>(n));
    sc.prefix.emplace_back(0);
    for (std::int64_t l = 1; l < n; ++l) sc.prefix.push_back(sc.prefix.back() + eta[static_cast<std::size_t>(l)]);
    auto hull = [&](std::int64_t a, std::int64_t b, std::int64_t parent) {
      Block blk;
      blk.first = a;
      blk.last = b;
      blk.length = QSqrt2(b - a + 1) * dk + (sc.prefix[static_cast<std::size_t>(b - 1)] - sc.prefix[static_cast<std::size_t>(a - 1)]);
      blk.parent = parent;
      return blk;
    };
    Block root;
    root.first = 1;
    root.last = n;
    root.length = star.delta(k - 1);
    sc.stages.push_back({root});
    for (int s = 1; s <= sc.i; ++s) {
      const auto& prev = sc.stages.back();
      std::vector<Block> cur;
      for (std::size_t p = 0; p < prev.size(); ++p) {
        const Block& b = prev[p];
        const auto parent = static_cast<std::int64_t>(p);
        if (s == sc.i) {
          for (std::int64_t c = b.first; c <= b.last; ++c) {
            Block single;
            single.first = single.last = c;
            single.length = dk;
            single.parent = parent;
            cur.push_back(std::move(single));
          }
        } else {
          // Removing the midmost gap (the left one of two) splits t children after floor(t/2).
          const std::int64_t cut = b.first + b.span() / 2 - 1;
          cur.push_back(hull(b.first, cut, parent));
          cur.push_back(hull(cut + 1, b.last, parent));
        }
      }
      sc.stages.push_back(std::move(cur));
    }
    ladder.m_.push_back(ladder.m_.back() + sc.i);
    multiplicity *= static_cast<long>(n);
    ladder.schemes_.push_back(std::move(sc));
  }
  return ladder;
}

FamilySizes family_sizes(const RefinementLadder& ladder, int m) {
  LadderLevel lv = ladder.level(m);
  QSqrt2 sum;
  for (const Block& b : *lv.blocks) sum += b.length;
  FamilySizes out;
  out.count = lv.multiplicity * static_cast<unsigned long>(lv.blocks->size());
  out.total_length = QSqrt2(lv.multiplicity) * sum;
  return out;
}

std::vector<std::vector<PlacedBlock>> materialize(const RefinementLadder& ladder, int m, std::uint64_t cap) {
  if (m < 0 || m > ladder.top()) throw std::out_of_range("materialize level outside [0, top]");
  mpz_class total = 0;
  for (int j = 0; j <= m; ++j) total += family_sizes(ladder, j).count;
  if (total > mpz_class(std::to_string(cap), 10)) throw EnumerationTooLarge(total, cap);

  std::vector<std::vector<PlacedBlock>> out;
  out.push_back({PlacedBlock{ladder.star().root_left(), ladder.star().root_right(), -1}});
  int start_row = 0;  // row holding the starred parents of scheme k
  for (int k = 1; k <= ladder.depth_k() && static_cast<int>(out.size()) <= m; ++k) {
    const int i = ladder.i_k(k);
    std::vector<QSqrt2> parents;  // left ends; `out` grows below, so no references into it
    for (const PlacedBlock& b : out[static_cast<std::size_t>(start_row)]) parents.push_back(b.left);
    // Stage-s blocks are laid out parent by parent.
    for (int s = 1; s <= i && static_cast<int>(out.size()) <= m; ++s) {
      const auto& blocks = ladder.stage(k, s);
      const auto per_parent_prev = static_cast<std::int64_t>(ladder.stage(k, s - 1).size());
      std::vector<PlacedBlock> row;
      row.reserve(parents.size() * blocks.size());
      for (std::size_t p = 0; p < parents.size(); ++p) {
        const QSqrt2& base = parents[p];
        for (const Block& b : blocks) {
          QSqrt2 left = base + ladder.child_offset(k, b.first);
          PlacedBlock pb{left, left + b.length, static_cast<std::int64_t>(p) * per_parent_prev + b.parent};
          if (s == 1) pb.parent = static_cast<std::int64_t>(p);
          row.push_back(std::move(pb));
        }
      }
      out.push_back(std::move(row));
    }
    start_row += i;
  }
  return out;
}

std::size_t IntervalTree::node_count() const {
  std::size_t n = 0;
  for (const auto& row : levels) n += row.size();
  return n;
}

namespace {

IntervalTree build_tree(const std::vector<std::vector<PlacedBlock>>& rows, long prec) {
  IntervalTree tree;
  for (const auto& row : rows) {
    std::vector<IntervalTree::Node> level;
    level.reserve(row.size());
    for (const PlacedBlock& b : row) {
      IntervalTree::Node node;
      node.left = CertifiedReal(b.left, prec);
      node.right = CertifiedReal(b.right, prec);
      node.parent = b.parent;
      level.push_back(std::move(node));
    }
    if (!tree.levels.empty()) {
      auto& above = tree.levels.back();
      for (std::size_t i = 0; i < level.size(); ++i)
        above[static_cast<std::size_t>(level[i].parent)].children.push_back(static_cast<std::int64_t>(i));
    }
    tree.levels.push_back(std::move(level));
  }
  return tree;
}

}  // namespace

IntervalTree materialize_tree(const RefinementLadder& ladder, int m, std::uint64_t cap, long prec) {
  return build_tree(materialize(ladder, m, cap), prec);
}

IntervalTree construction_tree(const ConstructionSpec& spec, int k, std::uint64_t cap, long prec) {
  mpz_class total = 0;
  for (int j = 0; j <= k; ++j) total += spec.count(j);
  if (total > mpz_class(std::to_string(cap), 10)) throw EnumerationTooLarge(total, cap);
  std::vector<std::vector<PlacedBlock>> rows;
  rows.push_back({PlacedBlock{QSqrt2(0), QSqrt2(1), -1}});
  for (int j = 1; j <= k; ++j) {
    const Level& lv = spec.level(j);
    std::vector<PlacedBlock> row;
    const auto& above = rows.back();
    for (std::size_t p = 0; p < above.size(); ++p) {
      QSqrt2 x = above[p].left + lv.eta[0];
      for (std::int64_t i = 1; i <= lv.n; ++i) {
        row.push_back({x, x + lv.product, static_cast<std::int64_t>(p)});
        x = x + lv.product + lv.eta[static_cast<std::size_t>(i)];
      }
    }
    rows.push_back(std::move(row));
  }
  return build_tree(rows, prec);
}

}  // namespace hps
