#include <gtest/gtest.h>

#include <cmath>

#include "json.hpp"
#include "scatshift/config.hpp"
#include "scatshift/error.hpp"
#include "scatshift/experiments.hpp"

using namespace scatshift;
using nlohmann::json;

TEST(Config, DefaultsRoundTrip) {
  const auto cfg = ExperimentConfig::from_json("{}");
  const std::string text = cfg.to_json();
  EXPECT_EQ(ExperimentConfig::from_json(text).to_json(), text);
  const auto j = json::parse(text);
  EXPECT_EQ(j["basis"]["kind"], "surface_spline");
  EXPECT_DOUBLE_EQ(j["majorant"]["r"].get<double>(), 0.45);  // 0.9 (nu - d) / kappa
}

TEST(Config, StrictKeysAndTypes) {
  try {
    ExperimentConfig::from_json(R"({"basis": {"knd": "x"}})");
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("knd"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ExperimentConfig::from_json(R"({"nu": 2})"), InvalidArgument);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"basis": {"dim": "one"}})"), InvalidArgument);
  EXPECT_THROW(ExperimentConfig::from_json("{not json"), InvalidArgument);
}

TEST(Config, InfinityAsString) {
  const auto cfg = ExperimentConfig::from_json(R"({"norm": {"p": "inf"}})");
  EXPECT_TRUE(std::isinf(cfg.norm.p));
  EXPECT_EQ(json::parse(cfg.to_json())["norm"]["p"], "inf");
}

TEST(Config, Overrides) {
  std::string j = apply_override("{}", "reproduction.nu=3.5");
  j = apply_override(j, "target=cusp:c=0.5");
  j = apply_override(j, "centers.lo=[0,1]");
  const auto v = json::parse(j);
  EXPECT_DOUBLE_EQ(v["reproduction"]["nu"].get<double>(), 3.5);
  EXPECT_EQ(v["target"], "cusp:c=0.5");
  EXPECT_EQ(v["centers"]["lo"].size(), 2u);
  EXPECT_THROW(apply_override("{}", "novalue"), InvalidArgument);
}

TEST(Config, Validation) {
  auto cfg = ExperimentConfig::from_json(R"({"centers": {"source": "random", "count": 10}})");
  EXPECT_THROW(cfg.validate("density"), InvalidArgument);  // random centers need a seed
  EXPECT_NO_THROW(cfg.validate("nterm"));                  // nterm does not use centers
  cfg.centers.seed = 5;
  EXPECT_NO_THROW(cfg.validate("density"));
  cfg.r = 0.5;  // at the bound (nu - d) / kappa
  EXPECT_THROW(cfg.validate("density"), InvalidArgument);
  cfg.r.reset();
  cfg.nterm.nu = 2.0;
  EXPECT_THROW(cfg.validate("nterm"), InvalidArgument);
  EXPECT_NO_THROW(cfg.validate("rates", "linear"));
  EXPECT_THROW(cfg.validate("rates", "nterm"), InvalidArgument);
  EXPECT_THROW(cfg.validate("frobnicate"), InvalidArgument);
  auto v = ExperimentConfig::from_json(R"({"basis": {"dim": 2, "m": 2}, "reproduction": {"nu": 5}})");
  v.verify.seed = 1;
  EXPECT_THROW(v.validate("verify"), InvalidArgument);  // univariate only
}

TEST(Experiments, DensityCommandReport) {
  const auto cfg = ExperimentConfig::from_json(R"({
    "centers": {"source": "two_density", "lo": [-0.5], "hi": [1.5], "spacing": 0.03125},
    "reproduction": {"nu": 2}, "grid": {"lo": [0], "hi": [1], "spacing": 0.0078125}})");
  const auto res = run_command("density", cfg);
  EXPECT_TRUE(res.passed);
  const auto r = json::parse(res.report);
  EXPECT_EQ(r["command"], "density");
  EXPECT_EQ(r["results"]["nodes_with_H_below_h"], 0);
  ASSERT_EQ(res.artifacts.size(), 1u);
  EXPECT_EQ(res.artifacts[0].first, "density.csv");
  EXPECT_EQ(run_command("density", cfg).report, res.report);
}
