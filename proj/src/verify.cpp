// Invariant checks over the JSON reports written by the hpset tool.

#include <cmath>
#include <cstdlib>
#include <string>

#include "hps/cli.hpp"

namespace hps::cli {

namespace {

struct Checker {
  std::size_t checks = 0;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  }
};

// Exact value or enclosure midpoint as a double, for order checks on maps.
double approx(const Json& v) {
  if (v.contains("rat")) return decode(v).to_double();
  return 0.5 * (std::strtod(v["lo"].get<std::string>().c_str(), nullptr) +
                std::strtod(v["hi"].get<std::string>().c_str(), nullptr));
}

double num(const Json& v) { return std::strtod(v.get<std::string>().c_str(), nullptr); }

std::string at(const char* what, std::size_t i) { return std::string(what) + " [" + std::to_string(i) + "]"; }

void verify_validate(const Json& doc, Checker& c) {
  c.expect(doc.at("ok").get<bool>() == doc.at("violations").empty(), "validate: ok disagrees with violations");
}

void verify_build(const Json& doc, Checker& c) {
  const Json& list = doc.at("intervals");
  c.expect(doc.at("count").get<std::size_t>() == list.size(), "build: count disagrees with interval list");
  QSqrt2 prev_right(0);
  for (std::size_t i = 0; i < list.size(); ++i) {
    const QSqrt2 l = decode(list[i].at("left")), r = decode(list[i].at("right"));
    c.expect(l < r, at("build: empty interval", i));
    c.expect(decode(list[i].at("length")) == r - l, at("build: length is not right - left", i));
    c.expect(l >= prev_right, at("build: intervals overlap or are out of order", i));
    c.expect(l >= QSqrt2(0) && r <= QSqrt2(1), at("build: interval leaves [0,1]", i));
    prev_right = r;
  }
}

void verify_refine(const Json& doc, Checker& c) {
  const Json& levels = doc.at("levels");
  c.expect(static_cast<int>(levels.size()) == doc.at("top").get<int>() + 1, "refine: level count");
  for (std::size_t m = 0; m < levels.size(); ++m) {
    const Json& blocks = levels[m].at("blocks");
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const Json& blk = blocks[b];
      c.expect(decode(blk.at("length")) > QSqrt2(0), at("refine: nonpositive block length", m));
      c.expect(blk.at("span").get<long>() == blk.at("last").get<long>() - blk.at("first").get<long>() + 1,
               at("refine: span", m));
      if (b > 0) {
        const Json& prev = blocks[b - 1];
        c.expect(blk.at("first").get<long>() == prev.at("last").get<long>() + 1 &&
                     blk.at("parent").get<long>() >= prev.at("parent").get<long>(),
                 at("refine: blocks do not tile the parent pattern", m));
      }
    }
  }
}

void verify_stats(const Json& doc, Checker& c) {
  const Json& levels = doc.at("levels");
  for (std::size_t m = 0; m < levels.size(); ++m) {
    const Json& s = levels[m];
    if (!s.at("beta").is_null() && !s.at("Gamma").is_null()) {
      const QSqrt2 beta = decode(s["beta"]), Gamma = decode(s["Gamma"]);
      c.expect(beta >= QSqrt2(0) && beta < QSqrt2(1), at("stats: beta outside [0,1)", m));
      c.expect(Gamma >= QSqrt2(1) - QSqrt2(5) * beta, at("stats: Gamma < 1 - 5 beta", m));
      if (m + 1 < levels.size() && !levels[m + 1].at("lambda").is_null())
        c.expect(decode(levels[m + 1]["lambda"]) <= Gamma, at("stats: lambda_{m+1} > Gamma_m", m));
    }
    if (!s.at("gamma").is_null()) {
      const QSqrt2 g = decode(s["gamma"]);
      c.expect(g > QSqrt2(0) && g <= QSqrt2(1), at("stats: gamma outside (0,1]", m));
    }
    if (m > 0) {
      const QSqrt2 shrink = decode(s.at("lenF")) / decode(levels[m - 1].at("lenF"));
      c.expect(shrink <= QSqrt2(1), at("stats: |F_m| grew", m));
      if (!s.at("Lambda").is_null())
        c.expect(shrink <= QSqrt2(4) * decode(s["Lambda"]), at("stats: |F_m|/|F_m-1| > 4 Lambda_m", m));
    }
    if (s.at("max_children").get<long>() > 0)
      c.expect(s["min_children"].get<long>() >= 2 && s["max_children"].get<long>() <= 4,
               at("stats: children per block outside 2..4", m));
  }
}

void verify_box(const Json& box, Checker& c, const char* who) {
  const Json& scales = box.at("scales");
  const Json& counts = box.at("counts");
  c.expect(scales.size() == counts.size(), std::string(who) + ": scales and counts differ in length");
  for (std::size_t i = 1; i < scales.size() && i < counts.size(); ++i) {
    c.expect(QSqrt2::parse_rational(scales[i].get<std::string>()) <
                 QSqrt2::parse_rational(scales[i - 1].get<std::string>()),
             at("box count: scales must decrease", i));
    c.expect(mpz_class(counts[i].get<std::string>()) >= mpz_class(counts[i - 1].get<std::string>()),
             at("box count: counts must not decrease", i));
  }
}

void verify_dim(const Json& doc, Checker& c) {
  const Json& s = doc.at("s");
  double tail = INFINITY;
  const std::size_t K = s.size();
  for (std::size_t i = K; i-- > 0;) {
    const double v = num(s[i].at("s_k"));
    c.expect(v >= 0 && v <= 1 + 1e-12, at("dim: s_k outside [0,1]", i + 1));
    if (i >= (K - 1) / 2) tail = std::min(tail, v);
  }
  if (K > 0) c.expect(std::abs(doc.at("liminf_prefix").get<double>() - tail) <= 1e-12, "dim: liminf_prefix is not the tail minimum");
  if (doc.contains("box_count")) verify_box(doc["box_count"], c, "dim");
}

void verify_check(const Json& doc, Checker& c) {
  for (const Json& v : doc.at("verdicts")) {
    const std::string id = v.at("id");
    c.expect(v.at("levels_examined").get<std::size_t>() == v.at("series").size(), "check: " + id + " series length");
    c.expect(v.at("implies_minimality").get<bool>() == (id.rfind("hdim", 0) != 0),
             "check: " + id + " implies_minimality flag");
    if (v.at("kind") == "constant" && v.at("bounded").get<bool>())
      c.expect(!v.at("best_constant").is_null(), "check: " + id + " bounded without a constant");
    if (!v.at("bounded").get<bool>()) c.expect(!v.at("holds_on_prefix").get<bool>(), "check: " + id + " unbounded but holds");
  }
}

void verify_measure(const Json& doc, Checker& c) {
  for (const Json& m : doc.at("measures")) {
    const std::string d = m.at("d");
    c.expect(m.at("conservation").at("ok").get<bool>() && m["conservation"]["failures"].get<long>() == 0,
             "measure d=" + d + ": conservation");
    c.expect(m.at("normalizers").at("ok").get<bool>() && m["normalizers"]["min_ratio"].get<double>() >= 1.0,
             "measure d=" + d + ": C(J,d) >= C(J,1)^d");
    for (const Json& h : m.at("holder")) c.expect(h.at("max_ratio").get<double>() > 0, "measure d=" + d + ": Hoelder ratio");
    if (m.contains("leaves")) {
      QSqrt2 total(0);
      bool exact = true;
      for (const Json& leaf : m["leaves"]) {
        if (!leaf.at("weight").contains("rat")) {
          exact = false;
          continue;
        }
        total += decode(leaf["weight"]);
      }
      if (exact) c.expect(total == QSqrt2(1), "measure d=" + d + ": leaf weights do not sum to 1");
    }
  }
}

void verify_push(const Json& doc, Checker& c) {
  const Json& images = doc.at("images");
  c.expect(doc.at("count").get<std::size_t>() == images.size(), "push: count");
  double prev = -1;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double l = approx(images[i].at("left")), r = approx(images[i].at("right"));
    c.expect(l < r && l >= prev - 1e-15, at("push: image order", i));
    prev = r;
  }
  verify_box(doc.at("box_count"), c, "push");
  if (!doc.at("distortion").is_null()) {
    const Json& p = doc["distortion"];
    c.expect(p.at("q_hat").get<double>() >= 1.0 && p.at("p_hat").get<double>() <= 1.0, "push: p_hat <= 1 <= q_hat");
  }
}

void verify_section(const std::string& cmd, const Json& doc, Checker& c) {
  if (cmd == "validate") verify_validate(doc, c);
  else if (cmd == "build") verify_build(doc, c);
  else if (cmd == "refine") verify_refine(doc, c);
  else if (cmd == "stats") verify_stats(doc, c);
  else if (cmd == "dim") verify_dim(doc, c);
  else if (cmd == "check") verify_check(doc, c);
  else if (cmd == "measure") verify_measure(doc, c);
  else if (cmd == "push") verify_push(doc, c);
  else if (cmd == "report") {
    for (const char* name : {"validate", "stats", "dim", "check", "measure", "push"})
      if (doc.contains(name)) verify_section(name, doc[name], c);
  } else {
    c.expect(false, "unknown report command '" + cmd + "'");
  }
}

}  // namespace

std::vector<std::string> verify_report(const Json& report, std::size_t& checks) {
  Checker c;
  try {
    verify_section(report.value("command", ""), report, c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("malformed report: ") + e.what());
  }
  checks = c.checks;
  return c.failures;
}

}  // namespace hps::cli
