#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sinhz/oracles.hpp"
#include "sinhz_tools/commands.hpp"
#include "test_models.hpp"

namespace {

using nlohmann::json;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "sinhz");
  std::ostringstream out, err;
  CliRun r;
  r.code = sinhz::tools::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string write_config(const std::string& name, const json& j) {
  const std::string path = ::testing::TempDir() + "/" + name + ".json";
  std::ofstream(path) << j.dump(2);
  return path;
}

json kobol_model() {
  return {{"type", "kobol"}, {"c", 0.3}, {"nu", 0.5}, {"lambda_minus", -8.0}, {"lambda_plus", 8.0}};
}

TEST(CliPrice, SymmetricPutMatchesOracle) {
  const json cfg = {{"model", kobol_model()},
                    {"payoff", {{"kind", "put"}, {"strike", 1.0}}},
                    {"request", {{"n", 12}, {"x", 0.1}}},
                    {"engine", {{"eps", 1e-12}, {"threads", 2}}}};
  const CliRun r = run({"price", "--config", write_config("put", cfg)});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rec = json::parse(r.out);
  for (const char* k : {"price", "achieved_error_estimate", "q_nodes_used", "inner_nodes_avg", "wall_time"})
    EXPECT_TRUE(rec.contains(k)) << k;
  const double want = sinhz::oracle_european_direct(sinhz::testing::symmetric_kobol(), sinhz::make_put(1.0), 12, 1.0,
                                                    0.1, 1e-12);
  EXPECT_NEAR(rec["price"].get<double>(), want, 1e-8 * want);
}

TEST(CliPrice, SeventeenSignificantDigits) {
  const json cfg = {{"model", kobol_model()},
                    {"payoff", {{"kind", "digital_down"}, {"level", 0.05}}},
                    {"request", {{"n", 12}, {"x", 0.1}}}};
  const CliRun r = run({"price", "--config", write_config("digits", cfg), "--threads", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string key = "\"price\": ";
  const size_t pos = r.out.find(key) + key.size();
  const std::string num = r.out.substr(pos, r.out.find(',', pos) - pos);
  int digits = 0;
  for (char ch : num.substr(0, num.find_first_of("eE"))) digits += std::isdigit(static_cast<unsigned char>(ch)) != 0;
  EXPECT_GE(digits, 16) << num;
}

TEST(CliPrice, MissingStrikeIsConfigError) {
  const json cfg = {{"model", kobol_model()}, {"payoff", {{"kind", "put"}}}, {"request", {{"n", 12}}}};
  const CliRun r = run({"price", "--config", write_config("nostrike", cfg)});
  EXPECT_EQ(r.code, 2);
  const json d = json::parse(r.err);
  EXPECT_EQ(d["error"], "config");
  EXPECT_EQ(d["field"], "/payoff/strike");
}

TEST(CliPrice, KnockedOutBarrierPricesZero) {
  const json cfg = {{"model", kobol_model()},
                    {"payoff", {{"kind", "digital_down"}, {"level", 0.05}}},
                    {"request", {{"n", 12}, {"x", 0.5}, {"barrier", 0.3}}}};
  const CliRun r = run({"price", "--config", write_config("knocked", cfg)});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["price"].get<double>(), 0.0);
}

TEST(CliPrice, UnreadableConfigAndBadArgs) {
  EXPECT_EQ(run({"price", "--config", "/nonexistent/cfg.json"}).code, 2);
  EXPECT_EQ(run({"price"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST(CliPrice, DampingOutsideStripRejected) {
  const json cfg = {{"model", kobol_model()},
                    {"payoff", {{"kind", "put"}, {"strike", 1.0}, {"beta", 0.5}}},
                    {"request", {{"n", 12}}}};
  EXPECT_EQ(run({"price", "--config", write_config("damp", cfg)}).code, 2);
}

TEST(CliBenchmark, HeaderContractAndGainFactors) {
  const CliRun r = run({"benchmark"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line,
            "n,M,eps,N_trap_predicted,N_trap_measured,N_sinh_predicted,N_sinh_measured,K_predicted,K_measured,err_trap,"
            "err_sinh");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 11u) << line;
    rows.push_back(cells);
  }
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "1260");
  EXPECT_NEAR(std::stod(rows[0][7]), 13.7, 0.05);
  EXPECT_NEAR(std::stod(rows[2][7]), 56.7, 0.05);
}

TEST(CliBenchmark, CustomGridAndTransform) {
  const json cfg = {{"benchmark", {{"transform", "geometric"}, {"grid", {{{"n", 100}, {"M", 10.0}, {"eps", 1e-12}}}}}}};
  const CliRun r = run({"benchmark", "--config", write_config("bench", cfg)});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n100,10,"), std::string::npos) << r.out;
  const json bad = {{"benchmark", {{"transform", "nope"}}}};
  EXPECT_EQ(run({"benchmark", "--config", write_config("badbench", bad)}).code, 2);
}

TEST(CliTrace, QuadraticHyperbolaWithSmallResidual) {
  const json cfg = {{"model", {{"type", "quadratic"}, {"d0", 1.0}}},
                    {"trace", {{"delta", 0.3}, {"u", -0.5}, {"x_max", 20.0}}}};
  const CliRun r = run({"trace", "--config", write_config("trace", cfg)});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,re,im,segment,im_psi_residual");
  double worst_res = 0.0, worst_hyp = 0.0;
  int wing = 0;
  while (std::getline(is, line)) {
    std::vector<std::string> c;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) c.push_back(cell);
    if (c.size() < 5 || c[4].empty()) continue;
    const double t = std::stod(c[0]), im = std::stod(c[2]);
    worst_res = std::max(worst_res, std::abs(std::stod(c[4])));
    if (c[3] == "right_wing") {
      worst_hyp = std::max(worst_hyp, std::abs(im - 0.15 / t));
      ++wing;
    }
  }
  EXPECT_GT(wing, 10);
  EXPECT_LE(worst_res, 1e-9);
  EXPECT_LE(worst_hyp, 1e-10);
}

TEST(CliTrace, UnsupportedModelIsConfigError) {
  const json cfg = {{"model", {{"type", "vg"}, {"sigma", 0.2}}}};
  const CliRun r = run({"trace", "--config", write_config("vg", cfg)});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err)["field"], "/model/type");
}

TEST(CliTrace, OutputFileFlag) {
  const json cfg = {{"model", {{"type", "quadratic"}}}, {"trace", {{"delta", 0.3}, {"u", -0.5}, {"x_max", 5.0}}}};
  const std::string out = ::testing::TempDir() + "/curve.csv";
  const CliRun r = run({"trace", "--config", write_config("traceout", cfg), "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,re,im,segment,im_psi_residual");
}

TEST(CliVerify, WienerHopfSuitePasses) {
  const CliRun r = run({"verify", "wh-identity", "--threads", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("PASS criterion 5"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("suite passed"), std::string::npos);
}

TEST(CliVerify, HardySuiteReportsVerdict) {
  const CliRun r = run({"verify", "hardy"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("criterion 4"), std::string::npos) << r.out;
}

TEST(CliVerify, UnknownSuiteIsConfigError) { EXPECT_EQ(run({"verify", "nosuch"}).code, 2); }

TEST(CliDeterminism, RepeatedRunsAgree) {
  const json cfg = {{"model", {{"type", "nig"}, {"alpha_s", 2.0}, {"beta_s", 0.5}}},
                    {"payoff", {{"kind", "put"}, {"strike", 1.0}}},
                    {"request", {{"n", 12}, {"x", 0.0}}}};
  const std::string path = write_config("det", cfg);
  const CliRun a = run({"price", "--config", path, "--threads", "3"});
  const CliRun b = run({"price", "--config", path, "--threads", "3"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(json::parse(a.out)["price"], json::parse(b.out)["price"]);
}

}  // namespace
