#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hps/cli.hpp"

using hps::cli::Json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = hps::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus(const std::string& name) { return std::string(HPS_CORPUS_DIR) + "/" + name; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("hpset_test_" + name);
}

}  // namespace

TEST(Cli, ValidateExample5) {
  auto r = run({"validate", "--builtin", "example5", "--depth", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.json()["ok"].get<bool>());
  EXPECT_TRUE(r.json()["violations"].empty());
}

TEST(Cli, ValidateBrokenFileExitsOne) {
  const auto path = temp_file("broken.hps");
  std::ofstream(path) << "family broken\nn(k) = 2\nc(k) = 1/3\neta(k,l) = if l == 1 then 1/3^k + 1/100 else 0\n";
  auto r = run({"validate", "--spec", path.string(), "--depth", "4"});
  EXPECT_EQ(r.code, 1);
  const Json v = r.json()["violations"];
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0]["kind"], "gap_sum");
  std::filesystem::remove(path);
}

TEST(Cli, DimMiddleThirdsColumn) {
  auto r = run({"dim", "--builtin", "uniform:2,1/3", "--depth", "15", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "k,s_k");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.find(',') + 1, 14), "0.630929753571") << line;
  }
  EXPECT_EQ(rows, 15);
}

TEST(Cli, CheckExample5) {
  auto r = run({"check", "--builtin", "example5", "--depth", "10", "--id", "A,B,thm3_c,routine_a,routine_c", "--alpha",
                "1/2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json v = r.json()["verdicts"];
  ASSERT_EQ(v.size(), 5u);
  for (int i : {0, 1}) {
    EXPECT_FALSE(v[i]["holds_on_prefix"].get<bool>());
    const Json& series = v[i]["series"];
    for (std::size_t j = 1; j < series.size(); ++j)
      EXPECT_GT(hps::cli::decode(series[j]["value"]), hps::cli::decode(series[j - 1]["value"])) << v[i]["id"] << j;
    EXPECT_EQ(hps::cli::decode(v[i]["best_constant"]), hps::QSqrt2(322));
  }
  EXPECT_EQ(v[4]["id"], "routine_c");
  EXPECT_TRUE(v[4]["holds_on_prefix"].get<bool>());
  EXPECT_GT(v[4]["last_value"].get<double>(), 0.3);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"validate", "--builtin", "example5", "--bogus"}).code, 2);
  EXPECT_EQ(run({"validate"}).code, 2);
  EXPECT_EQ(run({"build", "--builtin", "example5", "--spec", corpus("example5.hps")}).code, 2);
  EXPECT_EQ(run({"build", "--builtin", "nosuch"}).code, 2);
  EXPECT_EQ(run({"push", "--builtin", "example5", "--depth", "2"}).code, 2);
  EXPECT_EQ(run({"push", "--builtin", "example5", "--depth", "2", "--map", "twist"}).code, 2);
  EXPECT_EQ(run({"measure", "--builtin", "example5", "--depth", "2", "--d", "3/2"}).code, 2);
  EXPECT_EQ(run({"check", "--builtin", "example5", "--depth", "4", "--id", "nope"}).code, 2);
  EXPECT_EQ(run({"dim", "--builtin", "example5", "--depth", "4", "--scales", "geom:1/2"}).code, 2);
  EXPECT_EQ(run({"build", "--builtin", "example5", "--depth", "9"}).code, 2);
  auto r = run({"build", "--builtin", "example5", "--depth", "9"});
  EXPECT_NE(r.err.find("--cap"), std::string::npos);
  EXPECT_EQ(run({"validate", "--builtin", "example5", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ParseErrorNamesPosition) {
  const auto path = temp_file("bad.hps");
  std::ofstream(path) << "family bad\nn(k) = 2 + )\nc(k) = 1/3\n";
  auto r = run({"build", "--spec", path.string(), "--depth", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
  std::filesystem::remove(path);
}

TEST(Cli, SpecFileMatchesBuiltin) {
  auto a = run({"build", "--spec", corpus("example5.hps"), "--depth", "3"});
  auto b = run({"build", "--builtin", "example5", "--depth", "3"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.json()["intervals"], b.json()["intervals"]);
}

TEST(Cli, DeterministicOutput) {
  const std::vector<std::string> args = {"report", "--builtin", "middle_alpha:1/5", "--depth", "5", "--map", "pow:2"};
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.json().contains("meta"));
  auto args_meta = args;
  args_meta.push_back("--meta");
  EXPECT_TRUE(run(args_meta).json().contains("meta"));
}

TEST(Cli, ExactEncodingRoundTrip) {
  const hps::QSqrt2 x = (hps::QSqrt2(4) - hps::QSqrt2::sqrt2()) / hps::QSqrt2(168);
  const Json j = hps::cli::encode(x);
  EXPECT_EQ(j["rat"], "1/42");
  EXPECT_EQ(j["sqrt2"], "-1/168");
  EXPECT_EQ(j["decimal"].get<std::string>().substr(0, 8), "0.015391");
  EXPECT_EQ(hps::cli::decode(j), x);
  EXPECT_THROW(hps::cli::decode(Json{{"rat", 1}}), std::invalid_argument);
}

TEST(Cli, StatsFieldNames) {
  auto r = run({"stats", "--builtin", "example5", "--depth", "4", "--eps", "1/10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json lv = r.json()["levels"][1];
  for (const char* key : {"m", "beta", "Gamma", "gamma", "Lambda", "lambda", "lenF"}) EXPECT_TRUE(lv.contains(key)) << key;
  EXPECT_TRUE(r.json()["levels"][0]["gamma"].is_null());
  EXPECT_TRUE(r.json().contains("density"));
  auto csv = run({"stats", "--builtin", "example5", "--depth", "4", "--format", "csv"});
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "m,k,stage,beta,Gamma,gamma,Lambda,lambda,lenF");
}

TEST(Cli, VerifyEveryReport) {
  const std::vector<std::vector<std::string>> commands = {
      {"validate", "--builtin", "example5", "--depth", "6"},
      {"build", "--builtin", "example5", "--depth", "3"},
      {"refine", "--builtin", "example5", "--depth", "5"},
      {"stats", "--builtin", "remark_example", "--depth", "4"},
      {"dim", "--builtin", "example5", "--depth", "4", "--scales", "geom:1/2:1:8"},
      {"check", "--builtin", "example5", "--depth", "6"},
      {"measure", "--builtin", "uniform:3,1/5", "--depth", "3", "--leaves"},
      {"push", "--builtin", "example5", "--depth", "3", "--map", "comp:pow:1/2+pwl:1/2,1/4"},
      {"report", "--builtin", "example5", "--depth", "6", "--map", "identity"},
  };
  const auto path = temp_file("report.json");
  for (auto args : commands) {
    args.insert(args.end(), {"--out", path.string()});
    auto r = run(args);
    ASSERT_EQ(r.code, 0) << args[0] << ": " << r.err;
    auto v = run({"verify", path.string()});
    EXPECT_EQ(v.code, 0) << args[0] << ": " << v.out;
    EXPECT_GT(v.json()["checks"].get<int>(), 0) << args[0];
  }
  std::filesystem::remove(path);
}

TEST(Cli, VerifyCatchesTampering) {
  auto r = run({"stats", "--builtin", "example5", "--depth", "4"});
  Json doc = r.json();
  doc["levels"][2]["Gamma"] = hps::cli::encode(hps::QSqrt2(0));
  const auto path = temp_file("tampered.json");
  std::ofstream(path) << doc.dump();
  auto v = run({"verify", path.string()});
  EXPECT_EQ(v.code, 1);
  EXPECT_FALSE(v.json()["failures"].empty());
  std::ofstream(path) << "not json";
  EXPECT_EQ(run({"verify", path.string()}).code, 2);
  std::filesystem::remove(path);
}

TEST(Cli, PrecisionFromEnvironment) {
  ::setenv("HPSET_PREC", "256", 1);
  auto r = run({"dim", "--builtin", "uniform:2,1/3", "--depth", "3"});
  ::setenv("HPSET_PREC", "12", 1);
  auto bad = run({"dim", "--builtin", "uniform:2,1/3", "--depth", "3"});
  ::unsetenv("HPSET_PREC");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GE(r.json()["precision_used"].get<int>(), 256);
  EXPECT_EQ(bad.code, 2);
  auto flag = run({"dim", "--builtin", "uniform:2,1/3", "--depth", "3", "--prec", "512"});
  EXPECT_GE(flag.json()["precision_used"].get<int>(), 512);
}

TEST(Cli, PrettyAndOut) {
  auto r = run({"validate", "--builtin", "example5", "--depth", "3", "--format", "pretty"});
  EXPECT_NE(r.out.find("ok: true"), std::string::npos) << r.out;
  auto m = run({"measure", "--builtin", "uniform:2,1/3", "--depth", "4", "--d", "0.63", "--format", "csv"});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(m.out.substr(0, 18), "d,level,max_ratio\n");
  EXPECT_NE(m.out.find("63/100,4,"), std::string::npos);
}
