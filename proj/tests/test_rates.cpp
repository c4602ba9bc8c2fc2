#include <gtest/gtest.h>

#include <cmath>

#include "scatshift/rates.hpp"

using namespace scatshift;

TEST(Rates, LogLogFit) {
  const std::vector<double> x{1, 2, 4, 8}, y{3, 0.75, 0.1875, 0.046875};
  const auto f = fit_loglog(x, y);
  ASSERT_TRUE(f.defined);
  EXPECT_NEAR(f.slope, -2.0, 1e-14);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-14);
  EXPECT_FALSE(fit_loglog(std::vector<double>{1.0}, std::vector<double>{1.0}).defined);
  // Non-positive values are skipped.
  EXPECT_NEAR(fit_loglog(std::vector<double>{1, 2, 4}, std::vector<double>{1, 0, 0.25}).slope, -1.0, 1e-14);
}

// Oracle: composite Simpson on a fine grid.
TEST(Rates, LpErrorOfZeroApproximant) {
  const auto f = make_target("bump:c=0.5,R=0.5", 1);
  const ScatteredApproximant zero(BasisFunction::truncated_power(2), {}, {});
  const int n = 20000;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / n, w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    acc += w * f(Point{x}) * f(Point{x});
  }
  const double l2 = std::sqrt(acc / (3.0 * n));
  const Box b{Point{0.0}, Point{1.0}};
  EXPECT_NEAR(lp_error(f, zero, b, 2.0, QuadratureSpec{1.0 / 64, 8, 0}), l2, 1e-10);
  EXPECT_NEAR(lp_error(f, zero, b, INFINITY, QuadratureSpec{1.0 / 64, 9, 0}), 1.0, 1e-6);  // nodes miss x = 1/2
}

TEST(Rates, ErrorBoxCoversCenters) {
  const auto f = make_target("bump:c=0.5,R=0.5", 1);
  const ScatteredApproximant S(BasisFunction::truncated_power(2), {Point{-2.0}, Point{0.5}}, {1.0, 1.0});
  const Box b = error_box(f, S);
  EXPECT_DOUBLE_EQ(b.lo[0], -2.0);
  EXPECT_DOUBLE_EQ(b.hi[0], 1.0);
}

TEST(Rates, LinearStudyUnivariate) {
  const auto phi = BasisFunction::surface_spline(1, 1);
  LinearLadder l;
  l.spacings = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  const auto r = linear_study(make_target("cosbump:c=0.5,R=0.5", 1), phi, ReproductionConfig::for_basis(phi, 2.0), l);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_NEAR(r.fit.slope, 2.0, 0.3);
  const std::string csv = r.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "h,error,centers,slope_to_date");
  // Reports carry no timings, so they are reproducible.
  const auto r2 = linear_study(make_target("cosbump:c=0.5,R=0.5", 1), phi, ReproductionConfig::for_basis(phi, 2.0), l);
  EXPECT_EQ(r.to_csv(), r2.to_csv());
  EXPECT_EQ(r.to_json(), r2.to_json());
}

TEST(Rates, SigmaStudyDecreases) {
  const auto phi = BasisFunction::truncated_power(2);
  const WaveletSystem sys = WaveletSystem::for_kappa(1, 2);
  NTermConfig cfg;
  cfg.nu = 3.0;
  cfg.s = 2.0;
  cfg.fine_level = 12;
  cfg.budget_tight = true;  // the default rule allocates nothing at these budgets
  const std::vector<long long> budgets{128, 512, 2048};
  const auto r = sigma_study(make_target("cosbump:c=0.5,R=0.5", 1), budgets, cfg, sys, phi, QuadratureSpec{1.0 / 256, 8, 0});
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_LT(r.points[2].error, r.points[0].error);
  for (const auto& p : r.points) EXPECT_LE(p.centers, static_cast<std::size_t>(p.x));
}
