#include "subgeo/errors.hpp"
#include "subgeo/harness.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace subgeo;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("subgeo_unit_" + name);
  fs::remove_all(d);
  return d;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(Config, DefaultsAndNormalization) {
  const RunConfig cfg = parse_config(R"j({"inclusion": {"family": "tensor", "k": 2, "m": 1}, "seed": 7})j");
  EXPECT_EQ(cfg.grid, 128);
  EXPECT_EQ(cfg.trials, 20);
  EXPECT_EQ(cfg.suites, suite_order());
  ASSERT_TRUE(cfg.seed.has_value());
  EXPECT_EQ(*cfg.seed, 7u);
  // Key order does not change the hash.
  const RunConfig same = parse_config(R"j({"seed": 7, "inclusion": {"m": 1, "k": 2, "family": "tensor"}})j");
  EXPECT_EQ(config_hash(cfg), config_hash(same));
  EXPECT_EQ(config_hash(cfg).size(), 16u);
  const RunConfig other = parse_config(R"j({"inclusion": {"family": "tensor", "k": 2, "m": 1}, "seed": 8})j");
  EXPECT_NE(config_hash(cfg), config_hash(other));
  // The output directory is not part of the hash.
  RunConfig moved = cfg;
  moved.output_dir = "elsewhere";
  EXPECT_EQ(config_hash(cfg), config_hash(moved));
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"j({"inclusion": {"family": "tensor(1,2)"}, "bogus": 1})j"), ConfigError);
  EXPECT_THROW(parse_config(R"j({"inclusion": {"family": "nope"}})j"), ConfigError);
  EXPECT_THROW(parse_config(R"j({"inclusion": {"family": "tensor(1,2)"}, "suites": ["nope"]})j"), ConfigError);
  EXPECT_THROW(parse_config(R"j({"inclusion": {"family": "tensor(1,2)"}, "grid": 4})j"), ConfigError);
  EXPECT_THROW(parse_config(R"j({"inclusion": {"family": "tensor(1,2)"}, "tolerances": {"nope": 1.0}})j"), ConfigError);
  EXPECT_THROW(parse_config(R"j({"inclusion": {"family": "tensor(1,2)"}, "seed": -1})j"), ConfigError);
  EXPECT_THROW(parse_config(R"j({"inclusion": {"family": "tensor(1,2)", "lambda": 1.5}})j"), ConfigError);
  EXPECT_THROW(parse_config(R"j({"inclusion": {"family": "tensor", "m": 1, "k": 1}})j"), ConfigError);
  EXPECT_THROW(parse_config(R"j({"inclusion": {"family": "custom", "m_blocks": [2], "generators": []}})j"),
               ConfigError);
}

TEST(Config, SuitesFollowCanonicalOrder) {
  const RunConfig cfg =
      parse_config(R"j({"inclusion": {"family": "tensor(1,2)"}, "suites": ["degeneracy", "construction"]})j");
  EXPECT_EQ(cfg.suites, (std::vector<std::string>{"construction", "degeneracy"}));
}

TEST(Config, CustomAndGroupFlipInclusions) {
  const RunConfig custom = parse_config(R"j({"inclusion": {"family": "custom", "m_blocks": [2],
      "generators": [{"re": [[1, 0], [0, -1]], "im": [[0, 0], [0, 0]]}], "lambda": 0.5}})j");
  const Inclusion a = make_inclusion(custom);
  EXPECT_EQ(a.m_algebra.dim(), 4);
  EXPECT_EQ(a.n_image.dim(), 2);
  EXPECT_DOUBLE_EQ(a.lambda, 0.5);

  const RunConfig flip = parse_config(R"j({"inclusion": {"family": "group_flip", "n_blocks": [2],
      "theta": {"kind": "conjugation", "signs": [1, -1]}}})j");
  const Inclusion b = make_inclusion(flip);
  EXPECT_EQ(b.m_algebra.dim(), 8);
  EXPECT_DOUBLE_EQ(b.lambda, 0.5);

  const RunConfig over = parse_config(R"j({"inclusion": {"family": "tensor(1,2)", "lambda": 0.3}})j");
  EXPECT_DOUBLE_EQ(make_inclusion(over).lambda, 0.3);
}

TEST(Verify, EmptySuitesWriteReportAndPass) {
  RunConfig cfg = parse_config(R"j({"inclusion": {"family": "tensor(1,2)"}, "suites": []})j");
  cfg.output_dir = scratch_dir("empty").string();
  std::ostringstream out;
  const VerifyOutcome o = cmd_verify(cfg, out);
  EXPECT_EQ(o.exit_code, exit_pass);
  const auto j = read_json(fs::path(cfg.output_dir) / "report.json");
  EXPECT_EQ(j.at("status"), "pass");
  EXPECT_TRUE(j.at("suites").empty());
  EXPECT_TRUE(j.at("seed").is_null());
}

TEST(Verify, WrongLambdaIsACheckFailure) {
  RunConfig cfg = parse_config(
      R"j({"inclusion": {"family": "tensor(1,2)", "lambda": 0.3}, "seed": 1, "suites": ["construction"]})j");
  cfg.output_dir = scratch_dir("lambda").string();
  std::ostringstream out;
  const VerifyOutcome o = cmd_verify(cfg, out);
  EXPECT_EQ(o.exit_code, exit_check_failure);
  EXPECT_NE(o.error.find("property"), std::string::npos);
  const auto j = read_json(fs::path(cfg.output_dir) / "report.json");
  EXPECT_EQ(j.at("status"), "error");
}

TEST(Verify, SuitesRequireSeed) {
  RunConfig cfg = parse_config(R"j({"inclusion": {"family": "tensor(1,2)"}, "suites": ["metric"]})j");
  cfg.output_dir = scratch_dir("noseed").string();
  std::ostringstream out;
  EXPECT_THROW(cmd_verify(cfg, out), ConfigError);
}

TEST(Verify, ConstructionSuiteReport) {
  RunConfig cfg = parse_config(
      R"j({"inclusion": {"family": "group_flip(scalars)"}, "seed": 3, "trials": 4, "suites": ["construction"]})j");
  cfg.output_dir = scratch_dir("construction").string();
  std::ostringstream out;
  const VerifyOutcome o = cmd_verify(cfg, out);
  EXPECT_EQ(o.exit_code, exit_pass) << out.str();
  const auto j = read_json(fs::path(cfg.output_dir) / "report.json");
  EXPECT_EQ(j.at("schema"), 1);
  EXPECT_EQ(j.at("config_hash"), o.config_hash);
  EXPECT_EQ(j.at("family"), "group_flip(scalars)");
  ASSERT_EQ(j.at("suites").size(), 1u);
  for (const auto& c : j.at("suites")[0].at("checks")) {
    EXPECT_TRUE(c.contains("paper_anchor"));
    EXPECT_EQ(c.at("status"), "pass") << c.dump();
  }
}

TEST(Geodesic, CsvAndSidecar) {
  RunConfig cfg = parse_config(R"j({"inclusion": {"family": "tensor(1,2)"}, "seed": 5, "grid": 16})j");
  cfg.output_dir = scratch_dir("geodesic").string();
  std::ostringstream out;
  EXPECT_EQ(cmd_geodesic(cfg, GeodesicOptions{}, out), exit_pass);
  const fs::path dir(cfg.output_dir);
  ASSERT_TRUE(fs::exists(dir / "geodesic.csv"));
  const auto j = read_json(dir / "geodesic.json");
  EXPECT_EQ(j.at("config_hash"), config_hash(cfg));
  std::ifstream csv(dir / "geodesic.csv");
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 1 + 17);
}

TEST(Log, RoundTripThroughFiles) {
  const fs::path dir = scratch_dir("log");
  fs::create_directories(dir);
  ComplexMatrix u0 = ComplexMatrix::Identity(2, 2);
  ComplexMatrix a(2, 2);
  a << Complex(0, 0.1), Complex(0.05, 0.02), Complex(-0.05, 0.02), Complex(0, -0.1);
  linalg::write_matrix_file((dir / "q0.txt").string(), u0);
  linalg::write_matrix_file((dir / "q1.txt").string(), linalg::expm_antihermitian(a));
  RunConfig cfg = parse_config(R"j({"inclusion": {"family": "tensor(1,2)"}})j");
  cfg.output_dir = (dir / "out").string();
  std::ostringstream out;
  EXPECT_EQ(cmd_log(cfg, (dir / "q0.txt").string(), (dir / "q1.txt").string(), out), exit_pass);
  const auto j = read_json(dir / "out" / "log.json");
  EXPECT_LT(j.at("residual").get<double>(), 1e-8);
  const ComplexMatrix z = linalg::read_matrix_file((dir / "out" / "z.txt").string());
  // N = C, so the horizontal log is the traceless part of a.
  const ComplexMatrix traceless = a - (a.trace() / 2.0) * ComplexMatrix::Identity(2, 2);
  EXPECT_LT((z - traceless).norm(), 1e-7);
}

TEST(Sweep, EmptyTrialsWriteHeaderOnly) {
  RunConfig cfg = parse_config(R"j({"inclusion": {"family": "tensor(1,2)"}, "seed": 2})j");
  cfg.output_dir = scratch_dir("sweep").string();
  std::ostringstream out;
  EXPECT_EQ(cmd_sweep(cfg, "convexity", 0, out), exit_pass);
  EXPECT_THROW(cmd_sweep(cfg, "nope", 1, out), ConfigError);
}

TEST(Families, ListsAllBuiltins) {
  std::ostringstream out;
  EXPECT_EQ(cmd_families(out), exit_pass);
  for (const std::string name :
       {"tensor(1,2)", "tensor(1,3)", "tensor(2,2)", "group_flip(scalars)", "group_flip(M2,flip)"})
    EXPECT_NE(out.str().find(name), std::string::npos) << name;
}

TEST(Environment, ToleranceOverride) {
  const double before = linalg::settings().spectral_tol;
  ::setenv("SUBFACTOR_GEO_TOL", "1e-9", 1);
  apply_environment();
  EXPECT_DOUBLE_EQ(linalg::settings().spectral_tol, 1e-9);
  ::setenv("SUBFACTOR_GEO_TOL", "abc", 1);
  EXPECT_THROW(apply_environment(), ConfigError);
  ::unsetenv("SUBFACTOR_GEO_TOL");
  linalg::settings().spectral_tol = before;
}
