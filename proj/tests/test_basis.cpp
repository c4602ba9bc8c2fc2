#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "scatshift/basis.hpp"

using namespace scatshift;

TEST(Basis, FundamentalConstants) {
  // Delta |x| = 2 delta in 1D; Delta^2 |x|^2 log|x| = 8 pi delta in 2D; Delta^2 |x| = -8 pi delta in 3D.
  EXPECT_NEAR(surface_spline_gamma(1, 1), 2.0, 1e-14);
  EXPECT_NEAR(surface_spline_gamma(2, 2), 8.0 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(surface_spline_gamma(3, 2), -8.0 * std::numbers::pi, 1e-12);
}

TEST(Basis, Values) {
  const auto tps = BasisFunction::surface_spline(2, 2);
  EXPECT_EQ(tps.kappa(), 4);
  EXPECT_TRUE(tps.log_branch());
  EXPECT_NEAR(tps(Point{3.0, 4.0}), 25.0 * std::log(5.0), 1e-12);
  EXPECT_EQ(tps(Point{0.0, 0.0}), 0.0);
  const auto tp = BasisFunction::truncated_power(3);
  EXPECT_DOUBLE_EQ(tp(Point{2.0}), 4.0);
  EXPECT_EQ(tp(Point{-1.0}), 0.0);
}

TEST(Basis, RejectsBadOrders) {
  EXPECT_THROW(BasisFunction::surface_spline(3, 1), std::exception);  // 2m <= d
  EXPECT_THROW(BasisFunction::truncated_power(0), std::exception);
}

// Tf against a central-difference oracle.
TEST(Basis, OperatorMatchesFiniteDifferences) {
  const auto f = make_target("bump:c=0.5,R=0.5", 1);
  const auto phi = BasisFunction::surface_spline(1, 1);  // T = D^2 / 2
  const double h = 1e-4;
  for (double t : {0.3, 0.55, 0.8}) {
    const double fd = (f(Point{t + h}) - 2 * f(Point{t}) + f(Point{t - h})) / (h * h);
    EXPECT_NEAR(apply_T(phi, f, Point{t}), fd / 2.0, 1e-5);
  }
  const auto tp = BasisFunction::truncated_power(2);  // T = D^2
  EXPECT_NEAR(apply_T(tp, f, Point{0.3}), 2.0 * apply_T(phi, f, Point{0.3}), 1e-12);
}

TEST(Basis, BiharmonicOperatorMatchesFiniteDifferences) {
  const auto f = make_target("bump:c=0.5,R=0.5", 2);
  const auto phi = BasisFunction::surface_spline(2, 2);
  const Point t{0.45, 0.6};
  const double h = 2e-3;
  auto lap = [&](const Point& x) {
    return (f(Point{x[0] + h, x[1]}) + f(Point{x[0] - h, x[1]}) + f(Point{x[0], x[1] + h}) +
            f(Point{x[0], x[1] - h}) - 4 * f(x)) / (h * h);
  };
  const double bilap = (lap(Point{t[0] + h, t[1]}) + lap(Point{t[0] - h, t[1]}) + lap(Point{t[0], t[1] + h}) +
                        lap(Point{t[0], t[1] - h}) - 4 * lap(t)) / (h * h);
  const double expected = bilap / (8.0 * std::numbers::pi);
  EXPECT_NEAR(apply_T(phi, f, t), expected, 1e-3 * std::abs(expected) + 1e-6);
}

// Property: f = int Tf(t) phi(x - t) dt for compactly supported smooth f.
TEST(Basis, RepresentationIdentity) {
  // The bump has steep derivatives near its edge, hence the fine panels.
  const QuadratureSpec quad{1.0 / 256, 8, 0};
  for (auto [d, m] : {std::pair{1, 1}, std::pair{1, 2}}) {
    const auto phi = BasisFunction::surface_spline(d, m);
    const auto f = make_target("bump:c=0.5,R=0.5", d);
    for (double x : {0.3, 0.5, 0.7, 1.3}) EXPECT_LT(representation_residual(phi, f, Point{x}, quad), 1e-8) << x;
  }
  const auto tp = BasisFunction::truncated_power(3);
  const auto f = make_target("cosbump:c=0.5,R=0.5", 1);
  EXPECT_LT(representation_residual(tp, f, Point{0.4}, QuadratureSpec{1.0 / 32, 8, 0}), 1e-12);
}

TEST(Basis, RepresentationIdentity2D) {
  const auto phi = BasisFunction::surface_spline(2, 2);
  const auto f = make_target("cosbump:c=0.5,R=0.5", 2);
  EXPECT_LT(representation_residual(phi, f, Point{0.4, 0.55}, QuadratureSpec{1.0 / 32, 8, 0}), 1e-9);
}
