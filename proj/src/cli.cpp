#include "hps/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "hps/analysis.hpp"
#include "hps/construction.hpp"
#include "hps/dimension.hpp"
#include "hps/measure.hpp"
#include "hps/qsmap.hpp"
#include "hps/reconstruction.hpp"
#include "hps/specfmt.hpp"

namespace hps::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string builtin;
  std::string spec_file;
  int depth = 8;
  long prec = kDefaultPrecision;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::string format = "json";
  std::string out_file;
  bool meta = false;
  std::string d_list = "1/2,4/5,9/10,99/100";
  std::string map;
  std::string eps;
  std::string alpha;
  std::string scales;
  std::string ids;
  std::string input;
  bool leaves = false;
};

std::string decimal(const QSqrt2& x, long prec = kDefaultPrecision) {
  return to_approx(x, std::max(prec, kDefaultPrecision)).value.to_decimal(30);
}

Json approx_json(const ApproxScalar& a) {
  return Json{{"decimal", a.value.to_decimal(30)}, {"error_bound", a.error_bound.to_decimal(3)}};
}

Json optional_exact(const std::optional<QSqrt2>& x) { return x ? encode(*x) : Json(nullptr); }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

// Exact value of a flag in the rule syntax; finite decimals are accepted as exact rationals.
QSqrt2 parse_value(const std::string& flag, const std::string& text) {
  try {
    return specfmt::eval_constant(text);
  } catch (const std::exception&) {
  }
  try {
    return QSqrt2(QSqrt2::parse_rational(text));
  } catch (const std::exception&) {
    throw UsageError("--" + flag + ": '" + text + "' is not an exact value (examples: 1/3, sqrt2/2, 0.25)");
  }
}

mpq_class parse_rational_flag(const std::string& flag, const std::string& text) {
  const QSqrt2 v = parse_value(flag, text);
  if (!v.is_rational()) throw UsageError("--" + flag + ": '" + text + "' must be rational");
  return v.rat();
}

std::vector<mpq_class> parse_scales(const std::string& text) {
  if (text.rfind("geom:", 0) == 0) {
    const auto parts = split(text.substr(5), ':');
    if (parts.size() != 3) throw UsageError("--scales geom:BASE:FROM:TO, e.g. geom:1/2:1:12");
    try {
      return geometric_scales(parse_rational_flag("scales", parts[0]), std::stoi(parts[1]), std::stoi(parts[2]));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--scales: ") + e.what());
    }
  }
  std::vector<mpq_class> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_rational_flag("scales", s));
  if (out.empty()) throw UsageError("--scales needs at least one scale");
  return out;
}

ConstructionSpec load_spec(const RunConfig& cfg) {
  if (cfg.builtin.empty() == cfg.spec_file.empty()) throw UsageError("give exactly one of --builtin NAME or --spec FILE");
  if (!cfg.builtin.empty()) {
    try {
      return builtin(cfg.builtin);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  specfmt::SpecAst ast;
  try {
    ast = specfmt::parse_file(cfg.spec_file);
  } catch (const specfmt::ParseError& e) {
    throw UsageError(cfg.spec_file + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) +
                     ": expected " + e.expected() + ", found " + e.found());
  } catch (const std::ios_base::failure& e) {
    throw UsageError("cannot read " + cfg.spec_file);
  }
  // Two spare levels: trimming and the dimension ratios read level k + 1.
  return specfmt::eval_spec(ast, cfg.depth + 2);
}

Json header(const RunConfig& cfg, const ConstructionSpec& spec) {
  return Json{{"command", cfg.command}, {"spec", spec.name()}, {"depth", cfg.depth}};
}

RefinementLadder make_ladder(const ConstructionSpec& spec, int depth) {
  return binary_refine(star_transform(spec, depth), depth);
}

// ---- subcommands ---------------------------------------------------------

Json cmd_validate(const RunConfig& cfg, int& code) {
  Json doc{{"command", "validate"}, {"depth", cfg.depth}};
  std::vector<Violation> violations;
  try {
    const ConstructionSpec spec = load_spec(cfg);
    doc["spec"] = spec.name();
    violations = validate(spec, cfg.depth).violations;
  } catch (const EvalError& e) {
    doc["spec"] = cfg.spec_file;
    violations.push_back({Violation::Kind::Evaluation, e.level(), e.index(), e.what()});
  }
  Json list = Json::array();
  for (const Violation& v : violations)
    list.push_back({{"kind", to_string(v.kind)}, {"level", v.level}, {"index", v.index}, {"message", v.message}});
  doc["ok"] = violations.empty();
  doc["violations"] = list;
  if (!violations.empty()) code = kViolation;
  return doc;
}

Json cmd_build(const RunConfig& cfg, const ConstructionSpec& spec) {
  Json doc = header(cfg, spec);
  const auto level = enumerate_level(spec, cfg.depth, cfg.cap);
  Json list = Json::array();
  for (const BasicInterval& b : level)
    list.push_back(
        {{"index", b.index}, {"left", encode(b.left)}, {"right", encode(b.right)}, {"length", encode(b.length())}});
  doc["count"] = level.size();
  doc["intervals"] = list;
  return doc;
}

Json cmd_refine(const RunConfig& cfg, const ConstructionSpec& spec) {
  Json doc = header(cfg, spec);
  const RefinementLadder ladder = make_ladder(spec, cfg.depth);
  Json mk = Json::array(), ik = Json::array();
  for (int k = 1; k <= ladder.depth_k(); ++k) {
    mk.push_back(ladder.m_k(k));
    ik.push_back(ladder.i_k(k));
  }
  doc["top"] = ladder.top();
  doc["m_k"] = mk;
  doc["i_k"] = ik;
  Json levels = Json::array();
  for (int m = 0; m <= ladder.top(); ++m) {
    const LadderLevel lv = ladder.level(m);
    Json blocks = Json::array();
    for (const Block& b : *lv.blocks)
      blocks.push_back({{"first", b.first}, {"last", b.last}, {"span", b.span()}, {"length", encode(b.length)},
                        {"parent", b.parent}});
    levels.push_back({{"m", m}, {"k", lv.k}, {"stage", lv.stage}, {"multiplicity", lv.multiplicity.get_str()},
                      {"blocks", blocks}});
  }
  doc["levels"] = levels;
  return doc;
}

Json cmd_stats(const RunConfig& cfg, const ConstructionSpec& spec) {
  Json doc = header(cfg, spec);
  const RefinementLadder ladder = make_ladder(spec, cfg.depth);
  const StatSeries series = stats(ladder);
  Json levels = Json::array();
  for (const LevelStats& s : series.levels) {
    levels.push_back({{"m", s.m},
                      {"k", s.k},
                      {"stage", s.stage},
                      {"count", s.count.get_str()},
                      {"lenF", encode(s.lenF)},
                      {"beta", optional_exact(s.beta)},
                      {"Gamma", optional_exact(s.Gamma)},
                      {"gamma", optional_exact(s.gamma)},
                      {"Lambda", optional_exact(s.Lambda)},
                      {"lambda", optional_exact(s.lambda)},
                      {"max_length", encode(s.max_length)},
                      {"min_length", encode(s.min_length)},
                      {"beta_block", s.beta_block},
                      {"beta_gap", s.beta_gap},
                      {"Gamma_block", s.Gamma_block},
                      {"gamma_block", s.gamma_block},
                      {"min_children", s.min_children},
                      {"max_children", s.max_children}});
  }
  doc["levels"] = levels;
  if (!cfg.eps.empty()) {
    const QSqrt2 eps = parse_value("eps", cfg.eps);
    const QSqrt2 alpha = cfg.alpha.empty() ? QSqrt2(mpq_class(1, 2)) : parse_value("alpha", cfg.alpha);
    Json dens = Json::array();
    for (int m = 1; m <= series.top(); ++m) {
      const DensityCounts c = density_counters(series, eps, alpha, m);
      dens.push_back({{"m", m}, {"S", c.S}, {"T", c.T}, {"ST", c.ST}});
    }
    doc["eps"] = encode(eps);
    doc["alpha"] = encode(alpha);
    doc["density"] = dens;
  }
  return doc;
}

Json box_json(const BoxCountResult& r) {
  Json scales = Json::array(), counts = Json::array();
  for (const auto& s : r.scales) scales.push_back(s.get_str());
  for (const auto& c : r.counts) counts.push_back(c.get_str());
  return Json{{"scales", scales}, {"counts", counts}, {"fitted_slope", r.fitted_slope}, {"residual", r.residual}};
}

Json cmd_dim(const RunConfig& cfg, const ConstructionSpec& spec) {
  Json doc = header(cfg, spec);
  const DimRatioSeries series = dim_ratio_sequence(spec, cfg.depth, cfg.prec);
  Json s = Json::array();
  for (int k = 1; k <= series.size(); ++k) {
    Json row = approx_json(series.value[static_cast<std::size_t>(k - 1)]);
    s.push_back({{"k", k}, {"s_k", row["decimal"]}, {"error_bound", row["error_bound"]}});
  }
  doc["s"] = s;
  doc["liminf_prefix"] = series.liminf_prefix;
  doc["trend"] = to_string(series.trend);
  doc["precision_used"] = series.precision_used;
  if (!cfg.scales.empty())
    doc["box_count"] = box_json(box_count(box_items(enumerate_level(spec, cfg.depth, cfg.cap)), parse_scales(cfg.scales)));
  return doc;
}

std::string kind_name(ConditionKind k) {
  switch (k) {
    case ConditionKind::Constant: return "constant";
    case ConditionKind::Limit: return "limit";
    case ConditionKind::Density: return "density";
  }
  return "constant";
}

Json cmd_check(const RunConfig& cfg, const ConstructionSpec& spec) {
  Json doc = header(cfg, spec);
  std::vector<std::string> ids = cfg.ids.empty() ? condition_ids() : split(cfg.ids, ',');
  for (const auto& id : ids)
    if (std::find(condition_ids().begin(), condition_ids().end(), id) == condition_ids().end())
      throw UsageError("--id: unknown condition '" + id + "'");
  ConditionOptions opts;
  opts.prec = cfg.prec;
  if (!cfg.eps.empty()) opts.threshold = parse_rational_flag("eps", cfg.eps);
  if (!cfg.alpha.empty()) opts.alpha = parse_rational_flag("alpha", cfg.alpha);
  if (spec.max_depth() < cfg.depth + 1) throw UsageError("check needs spec level depth + 1");
  const RefinementLadder ladder = make_ladder(spec, cfg.depth);
  const StatSeries series = stats(ladder);
  Json verdicts = Json::array();
  for (const auto& id : ids) {
    const ConditionVerdict v = check_condition(ladder, series, id, cfg.depth, opts);
    Json rows = Json::array();
    for (const LevelValue& lv : v.series)
      rows.push_back({{"index", lv.index},
                      {"value", optional_exact(lv.value)},
                      {"approx", lv.approx ? approx_json(*lv.approx) : Json(nullptr)},
                      {"witness", lv.witness}});
    verdicts.push_back({{"id", v.id},
                        {"kind", kind_name(v.kind)},
                        {"depth", v.depth},
                        {"levels_examined", v.levels_examined},
                        {"holds_on_prefix", v.holds_on_prefix},
                        {"bounded", v.bounded},
                        {"best_constant", optional_exact(v.best_constant)},
                        {"aux_constant", optional_exact(v.aux_constant)},
                        {"last_value", v.last_value ? Json(*v.last_value) : Json(nullptr)},
                        {"witness_level", v.witness_level},
                        {"witness_index", v.witness_index},
                        {"implies_minimality", v.implies_minimality},
                        {"note", v.note},
                        {"series", rows}});
  }
  doc["threshold"] = opts.threshold.get_str();
  doc["alpha"] = opts.alpha.get_str();
  doc["verdicts"] = verdicts;
  return doc;
}

Json cmd_measure(const RunConfig& cfg, const ConstructionSpec& spec, bool with_leaves) {
  Json doc = header(cfg, spec);
  const RefinementLadder ladder = make_ladder(spec, cfg.depth);
  // Deepest ladder level whose tree F_0..F_m fits in the cap.
  int top = -1;
  mpz_class nodes = 0;
  for (int m = 0; m <= ladder.top(); ++m) {
    nodes += family_sizes(ladder, m).count;
    if (nodes > mpz_class(std::to_string(cfg.cap))) break;
    top = m;
  }
  if (top < 1) throw EnumerationTooLarge(nodes, cfg.cap);
  const IntervalTree tree = materialize_tree(ladder, top, cfg.cap, cfg.prec);
  doc["tree"] = "ladder";
  doc["truncated"] = top < ladder.top();
  doc["levels"] = tree.depth();
  doc["node_count"] = tree.node_count();
  Json measures = Json::array();
  for (const auto& text : split(cfg.d_list, ',')) {
    const mpq_class d = parse_rational_flag("d", text);
    if (sgn(d) <= 0 || d >= 1) throw UsageError("--d values must lie in (0, 1), got " + text);
    const MassDistribution mu = build_measure(tree, d, cfg.prec);
    const ConservationReport cons = check_conservation(mu);
    const NormalizerReport norm = check_normalizers(mu);
    Json holder = Json::array();
    for (int l = 0; l <= mu.depth(); ++l) {
      const HolderResult h = holder_diagnostic(mu, level_segments(tree, l), l);
      holder.push_back({{"level", l}, {"max_ratio", h.max_ratio}, {"argmax", h.argmax}});
    }
    Json entry{{"d", d.get_str()},
               {"conservation",
                {{"nodes", cons.nodes},
                 {"exact_nodes", cons.exact_nodes},
                 {"failures", cons.failures},
                 {"max_width", cons.max_width},
                 {"ok", cons.ok()}}},
               {"normalizers",
                {{"nodes", norm.nodes}, {"violations", norm.violations}, {"min_ratio", norm.min_ratio}, {"ok", norm.ok()}}},
               {"holder", holder}};
    if (with_leaves) {
      Json leaves = Json::array();
      const auto& row = tree.levels.back();
      for (std::size_t i = 0; i < row.size(); ++i)
        leaves.push_back({{"index", i},
                          {"left", encode(row[i].left)},
                          {"right", encode(row[i].right)},
                          {"weight", encode(mu.weight.back()[i])}});
      entry["leaves"] = leaves;
    }
    measures.push_back(entry);
  }
  doc["measures"] = measures;
  return doc;
}

Json cmd_push(const RunConfig& cfg, const ConstructionSpec& spec) {
  if (cfg.map.empty()) throw UsageError("push needs --map DESC (identity | pow:A | pwl:x,y;... | comp:F+G)");
  QsMap map;
  try {
    map = parse_map(cfg.map);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--map: ") + e.what());
  }
  Json doc = header(cfg, spec);
  doc["map"] = map.describe();
  const auto level = enumerate_level(spec, cfg.depth, cfg.cap);
  const auto images = apply_map(map, level, cfg.prec);
  Json list = Json::array();
  for (const ImageInterval& im : images) list.push_back({{"left", encode(im.left)}, {"right", encode(im.right)}});
  doc["count"] = images.size();
  doc["images"] = list;
  const std::vector<mpq_class> scales =
      cfg.scales.empty() ? geometric_scales(mpq_class(1, 2), 1, 12) : parse_scales(cfg.scales);
  doc["box_count"] = box_json(image_box_dim(map, spec, cfg.depth, scales, cfg.cap, cfg.prec));

  const IntervalTree tree = construction_tree(spec, cfg.depth, cfg.cap, cfg.prec);
  const auto held = nested_pairs(tree, cfg.depth);
  if (held.size() >= 100) {
    const DistortionProfile p = fit_distortion(map, tree, sample_pairs(tree, 1000, 1), held);
    doc["distortion"] = {{"lambda_hat", p.lambda_hat},     {"p_hat", p.p_hat},
                         {"q_hat", p.q_hat},               {"sample_count", p.sample_count},
                         {"heldout_count", p.heldout_count}, {"max_violation", p.max_violation},
                         {"violations", p.violations},     {"degenerate", p.degenerate}};
  } else {
    doc["distortion"] = nullptr;
  }
  doc["triple_ratio_bound"] = triple_ratio_bound(map, 10000, 1);
  return doc;
}

// Largest k <= depth whose level has at most cap intervals.
int feasible_level(const ConstructionSpec& spec, int depth, std::uint64_t cap) {
  int k = depth;
  while (k > 1 && spec.count(k) > mpz_class(std::to_string(cap))) --k;
  return k;
}

// Node budget of the measure and push sections of a report.
constexpr std::uint64_t kReportNodes = std::uint64_t{1} << 15;

Json cmd_report(const RunConfig& cfg, const ConstructionSpec& spec) {
  Json doc = header(cfg, spec);
  int ignored = kOk;
  RunConfig sub = cfg;
  auto section = [&](const char* name, Json body) {
    body.erase("command");
    body.erase("spec");
    doc[name] = std::move(body);
  };
  sub.command = "validate";
  section("validate", cmd_validate(sub, ignored));
  sub.command = "stats";
  section("stats", cmd_stats(sub, spec));
  sub.command = "dim";
  if (!cfg.scales.empty()) {
    // The ratio sequence runs to --depth; only the box count needs a feasible level.
    RunConfig plain = sub;
    plain.scales.clear();
    Json dim = cmd_dim(plain, spec);
    const int kb = feasible_level(spec, cfg.depth, std::min(cfg.cap, kReportNodes));
    dim["box_count"] = box_json(box_count(box_items(enumerate_level(spec, kb, cfg.cap)), parse_scales(cfg.scales)));
    dim["box_count"]["depth"] = kb;
    section("dim", dim);
  } else {
    section("dim", cmd_dim(sub, spec));
  }
  sub.command = "check";
  section("check", cmd_check(sub, spec));
  sub.command = "measure";
  sub.cap = std::min(cfg.cap, kReportNodes);
  section("measure", cmd_measure(sub, spec, false));
  if (!cfg.map.empty()) {
    sub.command = "push";
    sub.depth = feasible_level(spec, cfg.depth, std::min(cfg.cap, kReportNodes / 8));
    section("push", cmd_push(sub, spec));
  }
  return doc;
}

// ---- output --------------------------------------------------------------

std::string scalar_text(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object() && v.contains("decimal")) return v["decimal"].get<std::string>();
  if (v.is_object() && v.contains("lo")) return "[" + v["lo"].get<std::string>() + ", " + v["hi"].get<std::string>() + "]";
  return v.dump();
}

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// One CSV table: the named array of objects, with the listed columns.
std::string csv_table(const Json& rows, const std::vector<std::string>& cols) {
  std::ostringstream os;
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const Json& r : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      std::string cell;
      if (r.contains(cols[i])) {
        const Json& v = r[cols[i]];
        cell = v.is_array() ? [&] {
          std::string s;
          for (std::size_t j = 0; j < v.size(); ++j) s += (j ? "." : "") + scalar_text(v[j]);
          return s;
        }()
                            : scalar_text(v);
      }
      os << (i ? "," : "") << csv_field(cell);
    }
    os << '\n';
  }
  return os.str();
}

std::string box_csv(const Json& box) {
  std::ostringstream os;
  os << "scale,count\n";
  for (std::size_t i = 0; i < box["scales"].size(); ++i)
    os << box["scales"][i].get<std::string>() << ',' << box["counts"][i].get<std::string>() << '\n';
  return os.str();
}

std::string to_csv(const Json& doc) {
  const std::string cmd = doc["command"];
  if (cmd == "validate") return csv_table(doc["violations"], {"kind", "level", "index", "message"});
  if (cmd == "build") return csv_table(doc["intervals"], {"index", "left", "right", "length"});
  if (cmd == "refine") {
    std::ostringstream os;
    os << "m,k,stage,block,first,last,length\n";
    for (const Json& lv : doc["levels"])
      for (std::size_t b = 0; b < lv["blocks"].size(); ++b) {
        const Json& blk = lv["blocks"][b];
        os << lv["m"] << ',' << lv["k"] << ',' << lv["stage"] << ',' << b << ',' << blk["first"] << ','
           << blk["last"] << ',' << scalar_text(blk["length"]) << '\n';
      }
    return os.str();
  }
  if (cmd == "stats")
    return csv_table(doc["levels"], {"m", "k", "stage", "beta", "Gamma", "gamma", "Lambda", "lambda", "lenF"});
  if (cmd == "dim") {
    std::string out = csv_table(doc["s"], {"k", "s_k"});
    if (doc.contains("box_count")) out += "\n" + box_csv(doc["box_count"]);
    return out;
  }
  if (cmd == "check")
    return csv_table(doc["verdicts"], {"id", "kind", "holds_on_prefix", "bounded", "best_constant", "last_value",
                                       "witness_level", "witness_index"});
  if (cmd == "measure") {
    std::ostringstream os;
    os << "d,level,max_ratio\n";
    for (const Json& m : doc["measures"])
      for (const Json& h : m["holder"])
        os << m["d"].get<std::string>() << ',' << h["level"] << ',' << h["max_ratio"].dump() << '\n';
    return os.str();
  }
  if (cmd == "push") return box_csv(doc["box_count"]);
  throw UsageError("--format csv is not available for " + cmd);
}

void pretty(std::ostream& os, const Json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      const Json& x = it.value();
      const bool leaf = !x.is_structured() || (x.is_object() && (x.contains("decimal") || x.contains("lo")));
      if (leaf) {
        os << pad << it.key() << ": " << scalar_text(x) << '\n';
      } else {
        os << pad << it.key() << ":\n";
        pretty(os, x, indent + 2);
      }
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i].is_structured() && !(v[i].is_object() && v[i].contains("decimal"))) {
        os << pad << "- [" << i << "]\n";
        pretty(os, v[i], indent + 2);
      } else {
        os << pad << "- " << scalar_text(v[i]) << '\n';
      }
    }
  } else {
    os << pad << scalar_text(v) << '\n';
  }
}

std::string render(const Json& doc, const std::string& format) {
  if (format == "json") return doc.dump(2) + "\n";
  if (format == "csv") return to_csv(doc);
  std::ostringstream os;
  pretty(os, doc, 0);
  return os.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Json cmd_verify(const RunConfig& cfg, int& code) {
  if (cfg.input.empty()) throw UsageError("verify needs a report file: hpset verify REPORT.json");
  std::ifstream in(cfg.input);
  if (!in) throw UsageError("cannot read " + cfg.input);
  Json report;
  try {
    report = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError(cfg.input + ": not a JSON report (" + std::string(e.what()) + ")");
  }
  std::size_t checks = 0;
  const auto failures = verify_report(report, checks);
  if (!failures.empty()) code = kViolation;
  return Json{{"command", "verify"},
              {"target", report.value("command", "")},
              {"checks", checks},
              {"ok", failures.empty()},
              {"failures", failures}};
}

void add_common(CLI::App* sub, RunConfig& cfg, bool spec_flags = true) {
  if (spec_flags) {
    sub->add_option("--builtin", cfg.builtin, "Builtin spec NAME[:params], e.g. example5, uniform:2,1/3");
    sub->add_option("--spec", cfg.spec_file, "Spec file in the .hps format");
    sub->add_option("--depth", cfg.depth, "Construction level K")->check(CLI::Range(1, 1000));
    sub->add_option("--prec", cfg.prec, "Working precision in bits")->check(CLI::Range(64L, 1L << 20));
    sub->add_option("--cap", cfg.cap, "Enumeration cap")->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 40));
  }
  sub->add_option("--format", cfg.format, "json | csv | pretty")->check(CLI::IsMember({"json", "csv", "pretty"}));
  sub->add_option("--out", cfg.out_file, "Write the report to FILE");
  sub->add_flag("--meta", cfg.meta, "Add a meta field with a timestamp");
}

}  // namespace

Json encode(const QSqrt2& x) {
  return Json{{"rat", x.rat().get_str()}, {"sqrt2", x.sqrt2_part().get_str()}, {"decimal", decimal(x)}};
}

Json encode(const CertifiedReal& x) {
  if (x.is_exact()) return encode(*x.exact());
  return Json{{"lo", x.enclosure().lo().to_decimal(30)}, {"hi", x.enclosure().hi().to_decimal(30)}};
}

QSqrt2 decode(const Json& j) {
  if (!j.is_object() || !j.contains("rat") || !j.contains("sqrt2") || !j["rat"].is_string() || !j["sqrt2"].is_string())
    throw std::invalid_argument("expected an exact value {\"rat\": \"p/q\", \"sqrt2\": \"r/s\"}");
  return QSqrt2(QSqrt2::parse_rational(j["rat"].get<std::string>()),
                QSqrt2::parse_rational(j["sqrt2"].get<std::string>()));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (const char* env = std::getenv("HPSET_PREC")) {
    try {
      cfg.prec = std::stol(env);
    } catch (const std::exception&) {
      err << "HPSET_PREC must be an integer number of bits\n";
      return kUsage;
    }
    if (cfg.prec < 64) {
      err << "HPSET_PREC must be at least 64\n";
      return kUsage;
    }
  }

  CLI::App app{"Homogeneous perfect sets: construction, refinement ladders, dimension and minimality diagnostics",
               "hpset"};
  app.require_subcommand(1);
  struct SubInfo {
    const char* name;
    const char* help;
  };
  const SubInfo subs[] = {
      {"validate", "Check the gap-sum identity and parameter ranges up to --depth"},
      {"build", "Enumerate the level --depth intervals with exact endpoints"},
      {"refine", "Export the binary refinement ladder up to scheme --depth"},
      {"stats", "Gap and ratio statistics of every ladder level"},
      {"dim", "Dimension ratio sequence s_k, optionally with a box count"},
      {"check", "Evaluate minimality conditions on the finite prefix"},
      {"measure", "Mass distribution, conservation and Hoelder diagnostics"},
      {"push", "Push the level through a quasisymmetric map and box-count the image"},
      {"report", "All analyses in one JSON document"},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, cfg);
    const std::string name = s.name;
    if (name == "stats" || name == "check" || name == "report") {
      sub->add_option("--eps", cfg.eps, "Threshold: beta cut for densities, limit level for checks");
      sub->add_option("--alpha", cfg.alpha, "gamma cut for the density conditions");
    }
    if (name == "check" || name == "report") sub->add_option("--id", cfg.ids, "Comma-separated condition ids");
    if (name == "dim" || name == "push" || name == "report")
      sub->add_option("--scales", cfg.scales, "Box scales: LIST of rationals or geom:BASE:FROM:TO");
    if (name == "measure" || name == "report") sub->add_option("--d", cfg.d_list, "Comma-separated exponents in (0,1)");
    if (name == "measure") sub->add_flag("--leaves", cfg.leaves, "Include the deepest nodes with their weights");
    if (name == "push" || name == "report") sub->add_option("--map", cfg.map, "Map descriptor");
  }
  CLI::App* verify = app.add_subcommand("verify", "Re-check the invariants recorded in a JSON report");
  verify->add_option("report", cfg.input, "Report file")->required();
  add_common(verify, cfg, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "hpset: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }
  for (const CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();

  int code = kOk;
  Json doc;
  try {
    if (cfg.command == "validate") {
      doc = cmd_validate(cfg, code);
    } else if (cfg.command == "verify") {
      doc = cmd_verify(cfg, code);
    } else {
      const ConstructionSpec spec = load_spec(cfg);
      if (cfg.command == "build") doc = cmd_build(cfg, spec);
      else if (cfg.command == "refine") doc = cmd_refine(cfg, spec);
      else if (cfg.command == "stats") doc = cmd_stats(cfg, spec);
      else if (cfg.command == "dim") doc = cmd_dim(cfg, spec);
      else if (cfg.command == "check") doc = cmd_check(cfg, spec);
      else if (cfg.command == "measure") doc = cmd_measure(cfg, spec, cfg.leaves);
      else if (cfg.command == "push") doc = cmd_push(cfg, spec);
      else if (cfg.command == "report") doc = cmd_report(cfg, spec);
      else throw UsageError("unknown subcommand");
    }
    if (cfg.meta) doc["meta"] = {{"tool", "hpset"}, {"generated_at", utc_now()}, {"precision", cfg.prec}};
    const std::string text = render(doc, cfg.format);
    if (cfg.out_file.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.out_file, std::ios::binary);
      if (!file) throw UsageError("cannot write " + cfg.out_file);
      file << text;
    }
  } catch (const UsageError& e) {
    err << "hpset " << cfg.command << ": " << e.what() << '\n';
    return kUsage;
  } catch (const EnumerationTooLarge& e) {
    err << "hpset " << cfg.command << ": " << e.what() << "; lower --depth or raise --cap\n";
    return kUsage;
  } catch (const EvalError& e) {
    err << "hpset " << cfg.command << ": " << e.what() << "; run 'hpset validate' for the full list\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "hpset " << cfg.command << ": " << e.what() << "; lower --depth\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "hpset " << cfg.command << ": " << e.what() << '\n';
    return kUsage;
  }
  return code;
}

}  // namespace hps::cli
