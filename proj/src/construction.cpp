#include "hps/construction.hpp"

#include <sstream>

namespace hps {

ConstructionSpec::ConstructionSpec(std::string name, int max_depth, CountFn n, RatioFn c, GapFn eta)
    : state_(std::make_shared<State>()) {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be positive");
  state_->name = std::move(name);
  state_->max_depth = max_depth;
  state_->n = std::move(n);
  state_->c = std::move(c);
  state_->eta = std::move(eta);
}

const Level& ConstructionSpec::level(int k) const {
  if (k < 1 || k > state_->max_depth)
    throw std::out_of_range("level " + std::to_string(k) + " outside [1, " +
                            std::to_string(state_->max_depth) + "]");
  std::lock_guard<std::mutex> lock(state_->mu);
  auto& levels = state_->levels;
  while (static_cast<int>(levels.size()) < k) {
    const int j = static_cast<int>(levels.size()) + 1;
    Level lv;
    lv.k = j;
    lv.n = state_->n(j);
    if (lv.n < 1 || lv.n > kMaxChildren)
      throw EvalError("n(" + std::to_string(j) + ") = " + std::to_string(lv.n) +
                          " cannot be tabulated",
                      j);
    lv.c = state_->c(j);
    QSqrt2 prev = levels.empty() ? QSqrt2(1) : levels.back().product;
    lv.product = prev * lv.c;
    lv.eta.reserve(static_cast<std::size_t>(lv.n) + 1);
    for (std::int64_t l = 0; l <= lv.n; ++l) lv.eta.push_back(state_->eta(j, l, prev, lv.product));
    levels.push_back(std::move(lv));
  }
  return levels[static_cast<std::size_t>(k - 1)];
}

const QSqrt2& ConstructionSpec::eta(int k, std::int64_t l) const {
  const Level& lv = level(k);
  if (l < 0 || l > lv.n) throw std::out_of_range("gap index out of range");
  return lv.eta[static_cast<std::size_t>(l)];
}

QSqrt2 ConstructionSpec::product(int k) const { return k == 0 ? QSqrt2(1) : level(k).product; }

mpz_class ConstructionSpec::count(int k) const {
  mpz_class out = 1;
  for (int j = 1; j <= k; ++j) out *= static_cast<long>(level(j).n);
  return out;
}

ConstructionSpec ConstructionSpec::with_gap_offset(int k, std::int64_t l, const QSqrt2& delta) const {
  ConstructionSpec base = *this;
  auto n = [base](int j) { return base.n(j); };
  auto c = [base](int j) { return base.c(j); };
  auto eta = [base, k, l, delta](int j, std::int64_t i, const QSqrt2&, const QSqrt2&) {
    QSqrt2 v = base.eta(j, i);
    if (j == k && i == l) v += delta;
    return v;
  };
  return ConstructionSpec(name() + "+perturbed", max_depth(), n, c, eta);
}

ConstructionSpec ConstructionSpec::renamed(std::string new_name) const {
  ConstructionSpec out = *this;
  auto fresh = std::make_shared<State>();
  fresh->name = std::move(new_name);
  fresh->max_depth = state_->max_depth;
  fresh->n = state_->n;
  fresh->c = state_->c;
  fresh->eta = state_->eta;
  out.state_ = std::move(fresh);
  return out;
}

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::ChildCount: return "child_count";
    case Violation::Kind::Ratio: return "ratio";
    case Violation::Kind::NegativeGap: return "negative_gap";
    case Violation::Kind::GapSum: return "gap_sum";
    case Violation::Kind::Evaluation: return "evaluation";
  }
  return "unknown";
}

ValidationReport validate(const ConstructionSpec& spec, int depth) {
  if (depth < 1 || depth > spec.max_depth())
    throw std::out_of_range("validation depth outside [1, max_depth]");
  ValidationReport report;
  for (int k = 1; k <= depth; ++k) {
    const Level* lv = nullptr;
    try {
      lv = &spec.level(k);
    } catch (const EvalError& e) {
      report.violations.push_back({Violation::Kind::Evaluation, e.level(), e.index(), e.what()});
      break;  // deeper levels depend on this one
    } catch (const std::exception& e) {
      report.violations.push_back({Violation::Kind::Evaluation, k, -1, e.what()});
      break;
    }
    if (lv->n < 2)
      report.violations.push_back({Violation::Kind::ChildCount, k, -1,
                                   "n_" + std::to_string(k) + " = " + std::to_string(lv->n) + " < 2"});
    if (lv->c.sign() <= 0 || lv->c >= QSqrt2(1))
      report.violations.push_back(
          {Violation::Kind::Ratio, k, -1, "c_" + std::to_string(k) + " = " + lv->c.to_string() + " outside (0,1)"});
    QSqrt2 total = QSqrt2(lv->n) * lv->product;
    for (std::int64_t l = 0; l <= lv->n; ++l) {
      const QSqrt2& g = lv->eta[static_cast<std::size_t>(l)];
      if (g.sign() < 0)
        report.violations.push_back({Violation::Kind::NegativeGap, k, l,
                                     "eta_{" + std::to_string(k) + "," + std::to_string(l) +
                                         "} = " + g.to_string() + " < 0"});
      total += g;
    }
    QSqrt2 parent = spec.product(k - 1);
    if (total != parent) {
      std::ostringstream os;
      os << "gap-sum identity fails at k=" << k << ": sum eta + n P_k = " << total.to_string()
         << " but P_{k-1} = " << parent.to_string();
      report.violations.push_back({Violation::Kind::GapSum, k, -1, os.str()});
    }
  }
  return report;
}

std::vector<BasicInterval> enumerate_level(const ConstructionSpec& spec, int k, std::uint64_t cap) {
  if (k < 0 || k > spec.max_depth()) throw std::out_of_range("enumeration level outside spec depth");
  mpz_class total = spec.count(k);
  if (total > mpz_class(std::to_string(cap), 10)) throw EnumerationTooLarge(total, cap);

  std::vector<BasicInterval> current;
  current.push_back({0, {}, QSqrt2(0), QSqrt2(1)});
  for (int j = 1; j <= k; ++j) {
    const Level& lv = spec.level(j);
    std::vector<BasicInterval> next;
    next.reserve(current.size() * static_cast<std::size_t>(lv.n));
    for (const BasicInterval& parent : current) {
      QSqrt2 x = parent.left + lv.eta[0];
      for (std::int64_t i = 1; i <= lv.n; ++i) {
        BasicInterval child;
        child.level = j;
        child.index = parent.index;
        child.index.push_back(i);
        child.left = x;
        child.right = x + lv.product;
        x = child.right + lv.eta[static_cast<std::size_t>(i)];
        next.push_back(std::move(child));
      }
    }
    current = std::move(next);
  }
  return current;
}

ConstructionSpec builtin_uniform(std::int64_t n, const mpq_class& c, int max_depth) {
  if (n < 2) throw std::invalid_argument("uniform: n must be at least 2");
  if (sgn(c) <= 0 || c * n > 1) throw std::invalid_argument("uniform: need 0 < c <= 1/n");
  const mpq_class gap_ratio = (1 - c * n) / (n - 1);
  std::ostringstream name;
  name << "uniform(" << n << "," << c.get_str() << ")";
  return ConstructionSpec(
      name.str(), max_depth, [n](int) { return n; }, [c](int) { return QSqrt2(c); },
      [n, gap_ratio](int, std::int64_t l, const QSqrt2& prev, const QSqrt2&) {
        if (l == 0 || l == n) return QSqrt2(0);
        return QSqrt2(gap_ratio) * prev;
      });
}

ConstructionSpec builtin_middle_alpha(const mpq_class& alpha, int max_depth) {
  if (sgn(alpha) <= 0 || alpha >= 1) throw std::invalid_argument("middle_alpha: need 0 < alpha < 1");
  const mpq_class c = (1 - alpha) / 2;
  return ConstructionSpec(
      "middle_alpha(" + alpha.get_str() + ")", max_depth, [](int) { return std::int64_t{2}; },
      [c](int) { return QSqrt2(c); },
      [alpha](int, std::int64_t l, const QSqrt2& prev, const QSqrt2&) {
        return l == 1 ? QSqrt2(alpha) * prev : QSqrt2(0);
      });
}

std::int64_t example5_special_gap(int k) {
  const int half = k / 2;
  return (std::int64_t{1} << k) - (std::int64_t{1} << (k - half - 1));
}

ConstructionSpec builtin_example5(int max_depth) {
  auto n = [](int k) -> std::int64_t {
    if (k >= 62) throw EvalError("n_k = 2^k overflows", k);
    return std::int64_t{1} << k;
  };
  auto c = [](int k) { return (QSqrt2(mpz_class(mpz_class(1) << (k + 1))) + QSqrt2(k) * QSqrt2::sqrt2().pow(k)).inverse(); };
  auto eta = [](int k, std::int64_t l, const QSqrt2&, const QSqrt2& product) {
    const std::int64_t nk = std::int64_t{1} << k;
    if (l == 0 || l == nk) return QSqrt2(0);
    // The starred length delta_k equals P_k because edge gaps vanish.
    if (l == example5_special_gap(k)) return (QSqrt2(2) + QSqrt2(k) * QSqrt2::sqrt2().pow(k)) * product;
    return product;
  };
  return ConstructionSpec("example5", max_depth, n, c, eta);
}

ConstructionSpec builtin_remark_example(int max_depth) {
  auto n = [](int k) -> std::int64_t {
    if (k >= 62) throw EvalError("n_k = 2^k overflows", k);
    return std::int64_t{1} << k;
  };
  auto c = [](int k) { return QSqrt2(mpq_class(1, 3) / mpq_class(mpz_class(mpz_class(1) << k))); };
  auto eta = [](int k, std::int64_t l, const QSqrt2& prev, const QSqrt2& product) {
    const std::int64_t nk = std::int64_t{1} << k;
    if (l == 0 || l == nk) return QSqrt2(0);
    if (l == nk - 1) return QSqrt2(mpq_class(1, 3)) * prev + QSqrt2(2) * product;
    return product;
  };
  return ConstructionSpec("remark_example", max_depth, n, c, eta);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
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

ConstructionSpec builtin(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  const std::string name = descriptor.substr(0, colon);
  std::vector<std::string> params;
  if (colon != std::string::npos) params = split(descriptor.substr(colon + 1), ',');
  if (name == "uniform") {
    if (params.size() != 2) throw std::invalid_argument("uniform expects uniform:N,C");
    mpq_class nq = QSqrt2::parse_rational(params[0]);
    if (nq.get_den() != 1 || !nq.get_num().fits_slong_p())
      throw std::invalid_argument("uniform: n must be an integer");
    return builtin_uniform(nq.get_num().get_si(), QSqrt2::parse_rational(params[1]));
  }
  if (name == "middle_alpha") {
    if (params.size() != 1) throw std::invalid_argument("middle_alpha expects middle_alpha:ALPHA");
    return builtin_middle_alpha(QSqrt2::parse_rational(params[0]));
  }
  if (name == "example5") {
    if (!params.empty()) throw std::invalid_argument("example5 takes no parameters");
    return builtin_example5();
  }
  if (name == "remark_example") {
    if (!params.empty()) throw std::invalid_argument("remark_example takes no parameters");
    return builtin_remark_example();
  }
  throw std::invalid_argument("unknown builtin '" + name +
                              "' (expected uniform, middle_alpha, example5, remark_example)");
}

}  // namespace hps
