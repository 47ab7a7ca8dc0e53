#include "lrcycle/config.h"
#include "lrcycle/io.h"

#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"

namespace lrcycle {
namespace {

std::filesystem::path TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lrcycle_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(CsvTest, PlainRows) {
  const Dataset d = parse_dataset_csv("1,2\n-3,4.5\n\n# comment\n0,1e-3\n");
  ASSERT_EQ(d.size(), 3);
  ASSERT_EQ(d.dim(), 2);
  EXPECT_EQ(d.examples()(1, 0), -3.0);
  EXPECT_EQ(d.examples()(2, 1), 1e-3);
}

TEST(CsvTest, HeaderAndLabelFolding) {
  const Dataset d = parse_dataset_csv("x1,x2,label\n1,2,1\n3,-4,-1\n");
  ASSERT_EQ(d.dim(), 2);
  EXPECT_EQ(d.examples().row(0), Eigen::RowVector2d(1, 2));
  EXPECT_EQ(d.examples().row(1), Eigen::RowVector2d(-3, 4));
  const Dataset h = parse_dataset_csv("a,b\n1,2\n");
  EXPECT_EQ(h.size(), 1);
}

TEST(CsvTest, RejectsMalformedInput) {
  EXPECT_THROW(parse_dataset_csv(""), InputError);
  EXPECT_THROW(parse_dataset_csv("x1,x2\n"), InputError);
  EXPECT_THROW(parse_dataset_csv("1,2\n3\n"), InputError);
  EXPECT_THROW(parse_dataset_csv("1,abc\n"), InputError);
  EXPECT_THROW(parse_dataset_csv("label,x1\n1,2\n"), InputError);
  EXPECT_THROW(parse_dataset_csv("x1,label\n1,0.5\n"), InputError);
  EXPECT_THROW(parse_dataset_csv("1,nan\n"), InputError);
  EXPECT_THROW(load_dataset_csv("/nonexistent/file.csv"), InputError);
}

TEST(CsvTest, RoundTripIsExact) {
  std::mt19937_64 rng(61);
  const Examples x = testing::RandomExamples(12, 4, rng, 3.0);
  const Dataset d = parse_dataset_csv(examples_to_csv(x));
  EXPECT_EQ(d.examples(), x);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(CsvTest, ColumnLoader) {
  const auto dir = TempDir("column");
  write_text(dir / "s.csv", "step,norm\n0,1.5\n1,2.5\n");
  EXPECT_EQ(load_csv_column(dir / "s.csv", "norm"), (std::vector<double>{1.5, 2.5}));
  EXPECT_THROW(load_csv_column(dir / "s.csv", "loss"), InputError);
}

TEST(LiftedSpecTest, PathsResolveRelativeToSpec) {
  const auto dir = TempDir("spec");
  write_text(dir / "sub" / "base.csv", "1,0\n-1,0.5\n");
  write_lifted_spec(dir / "sub" / "lifted.json", {"base.csv", 7});
  const LiftedSpec s = load_lifted_spec(dir / "sub" / "lifted.json");
  EXPECT_EQ(s.ambient_dim, 7);
  EXPECT_TRUE(std::filesystem::exists(s.base_csv));
  write_text(dir / "bad.json", "{\"base_csv\": 3}");
  EXPECT_THROW(load_lifted_spec(dir / "bad.json"), InputError);
}

TEST(JsonTest, SolveReportFields) {
  SolveReport r;
  r.w_star = Vector::Constant(2, 0.5);
  r.lambda_max = 0.25;
  r.newton_iters = 4;
  const Json j = to_json(r);
  for (const char* key : {"w_star", "lambda", "grad_norm", "iters", "separable", "residuals"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["lambda"].get<double>(), 0.25);
}

TEST(JsonTest, HuntResultRoundTrip) {
  const std::string text = read_text(std::filesystem::path(LRCYCLE_TEST_DATA_DIR) / "base_cycle_long.jsonl");
  const Json j = Json::parse(text.substr(0, text.find('\n')));
  const HuntResult h = hunt_result_from_json(j);
  const HuntResult back = hunt_result_from_json(to_json(h));
  EXPECT_EQ(back.dataset.examples(), h.dataset.examples());
  EXPECT_EQ(back.cycle.cycle_points, h.cycle.cycle_points);
  EXPECT_EQ(back.eta, h.eta);
  EXPECT_EQ(back.trial, h.trial);
  EXPECT_THROW(hunt_result_from_json(Json::object()), InputError);
}

TEST(ConfigTest, JsonRoundTrip) {
  RunConfig cfg;
  cfg.command = "run";
  cfg.gamma = 1.23;
  cfg.w0 = {1.0, -2.0};
  cfg.coords = {0, 3};
  cfg.dim = 12;
  cfg.gammas = {1.1, 1.5};
  EXPECT_EQ(config_from_json(to_json(cfg)), cfg);
  EXPECT_EQ(config_from_json(to_json(RunConfig{})), RunConfig{});
  EXPECT_TRUE(to_json(RunConfig{})["divergence_bound"].is_null());
  EXPECT_EQ(to_json(RunConfig{})["dim"], "auto");
}

TEST(ConfigTest, MissingKeysKeepDefaultsUnknownKeysRejected) {
  const RunConfig cfg = config_from_json(Json::parse(R"({"gamma": 1.5, "steps": 10})"));
  EXPECT_EQ(cfg.gamma, 1.5);
  EXPECT_EQ(cfg.steps, 10);
  EXPECT_EQ(cfg.window, RunConfig{}.window);
  EXPECT_THROW(config_from_json(Json::parse(R"({"gama": 1.5})")), InputError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"gamma": "x"})")), InputError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), InputError);
}

}  // namespace
}  // namespace lrcycle
