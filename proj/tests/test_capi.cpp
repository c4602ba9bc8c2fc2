#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "json.hpp"
#include "scatshift/scatshift.h"

namespace {
std::string take(char* s) {
  std::string out = s ? s : "";
  ss_string_free(s);
  return out;
}
}  // namespace

TEST(CApi, Version) { EXPECT_STREQ(ss_version(), "1.0.0"); }

TEST(CApi, BasisLifecycle) {
  ss_basis* b = nullptr;
  ASSERT_EQ(ss_basis_create("surface_spline", 1, 1, &b), SS_OK);
  const double x = -0.3;
  double v = 0.0;
  ASSERT_EQ(ss_basis_eval(b, &x, &v), SS_OK);
  EXPECT_DOUBLE_EQ(v, 0.3);
  EXPECT_EQ(ss_basis_kappa(b), 2);
  ss_basis_free(b);

  EXPECT_EQ(ss_basis_create("gaussian", 1, 1, &b), SS_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(ss_last_error()).find("gaussian"), std::string::npos);
  EXPECT_EQ(ss_basis_create("truncated_power", 2, 2, &b), SS_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ss_basis_eval(nullptr, &x, &v), SS_ERR_INVALID_ARGUMENT);
}

TEST(CApi, CentersAndErrors) {
  ss_centers* c = nullptr;
  ASSERT_EQ(ss_centers_parse_csv("x0,x1\n0,0\n1,0\n0,1\n", &c), SS_OK);
  EXPECT_EQ(ss_centers_size(c), 3u);
  EXPECT_EQ(ss_centers_dim(c), 2);
  ss_centers_free(c);
  EXPECT_EQ(ss_centers_parse_csv("x0\n1\nzz\n", &c), SS_ERR_IO);
  EXPECT_NE(std::string(ss_last_error()).find("row 2"), std::string::npos) << ss_last_error();
  const double lo = 0.0, hi = 1.0;
  ASSERT_EQ(ss_centers_uniform(1, &lo, &hi, 0.25, &c), SS_OK);
  EXPECT_EQ(ss_centers_size(c), 5u);
  ss_centers_free(c);
  EXPECT_EQ(ss_centers_uniform(4, &lo, &hi, 0.25, &c), SS_ERR_INVALID_ARGUMENT);
}

TEST(CApi, ApproximantRoundTrip) {
  ss_basis* b = nullptr;
  ss_centers* c = nullptr;
  ss_approximant* a = nullptr;
  const double lo = -0.5, hi = 1.5;
  ASSERT_EQ(ss_basis_create("surface_spline", 1, 1, &b), SS_OK);
  ASSERT_EQ(ss_centers_uniform(1, &lo, &hi, 1.0 / 64, &c), SS_OK);
  ASSERT_EQ(ss_approximant_assemble(b, c, "bump:c=0.5,R=0.5", 2.0, 1.0 / 128, 4, &a), SS_OK) << ss_last_error();
  const double xs[3] = {0.25, 0.5, 0.8};
  double vals[3];
  ASSERT_EQ(ss_approximant_eval(a, xs, 3, vals), SS_OK);
  for (int i = 0; i < 3; ++i) {
    double f = 0.0;
    ASSERT_EQ(ss_target_eval("bump:c=0.5,R=0.5", 1, &xs[i], &f), SS_OK);
    EXPECT_NEAR(vals[i], f, 2e-3);
  }
  char* js = nullptr;
  ASSERT_EQ(ss_approximant_to_json(a, &js), SS_OK);
  const auto j = nlohmann::json::parse(take(js));
  EXPECT_TRUE(j.is_object());
  EXPECT_GT(ss_approximant_size(a), 0u);
  ss_approximant_free(a);
  ss_centers_free(c);
  ss_basis_free(b);
}

TEST(CApi, RunAndConfig) {
  char* out = nullptr;
  ASSERT_EQ(ss_config_override("{}", "reproduction.nu=2", &out), SS_OK);
  const std::string cfg = take(out);
  ASSERT_EQ(ss_config_resolve(cfg.c_str(), "density", &out), SS_OK);
  EXPECT_EQ(nlohmann::json::parse(take(out))["reproduction"]["nu"], 2.0);

  EXPECT_EQ(ss_run("nosuch", cfg.c_str(), nullptr, &out), SS_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ss_run("density", "{\"bogus\": 1}", nullptr, &out), SS_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ss_run(nullptr, cfg.c_str(), nullptr, &out), SS_ERR_INVALID_ARGUMENT);

  ASSERT_EQ(ss_run("density", cfg.c_str(), nullptr, &out), SS_OK) << ss_last_error();
  const auto r = nlohmann::json::parse(take(out));
  EXPECT_EQ(r["passed"], true);
  EXPECT_STREQ(ss_last_error(), "");
}
