#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scatshift/density.hpp"

using namespace scatshift;

namespace {
struct Fixture {
  BasisFunction phi = BasisFunction::surface_spline(1, 1);
  ReproductionConfig rc = ReproductionConfig::for_basis(phi, 2.0);
  CenterSet cs = two_density_centers(Box{Point{-0.5}, Point{1.5}}, 1.0 / 32, 4);
  GridSpec grid = GridSpec::covering(Box{Point{0.0}, Point{1.0}}, 1.0 / 128);
};
}  // namespace

TEST(Density, ExponentBounds) {
  EXPECT_DOUBLE_EQ(majorant_exponent_bound(2.0, 1, 2), 0.5);
  EXPECT_DOUBLE_EQ(default_majorant_exponent(2.0, 1, 2), 0.45);
  EXPECT_DOUBLE_EQ(majorant_exponent_bound(5.0, 2, 4), 0.75);
}

TEST(Density, TracksLocalSpacing) {
  Fixture fx;
  const DensityField h = build_density(fx.cs, fx.rc, fx.grid);
  const double left = h(Point{0.2}), right = h(Point{0.8});
  EXPECT_NEAR(right / left, 4.0, 1.0);
  EXPECT_GE(h.min(), h.h_min());
}

// Properties: H >= h on nodes, H <= max h, slow variation up to tol_disc.
TEST(Density, MajorantProperties) {
  Fixture fx;
  const DensityField h = build_density(fx.cs, fx.rc, fx.grid);
  const double r = default_majorant_exponent(2.0, 1, 2);
  const MajorantField H = MajorantField::build(h, r, 2.0, 2);
  for (std::size_t i = 0; i < fx.grid.size(); ++i) {
    EXPECT_GE(H.at_node(i), h.at_node(i));
    EXPECT_LE(H.at_node(i), h.max() * (1 + 1e-12));
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const Point x{u(rng)}, y{u(rng)};
    const double Hy = H(y);
    EXPECT_LE(Hy * std::pow(1 + distance(x, y) / Hy, -r), H(x) + H.tol_disc());
  }
}

TEST(Density, MajorantRejectsInadmissibleExponent) {
  Fixture fx;
  const DensityField h = build_density(fx.cs, fx.rc, fx.grid);
  EXPECT_THROW(MajorantField::build(h, 0.5, 2.0, 2), std::exception);
  EXPECT_THROW(MajorantField::build(h, 0.0, 2.0, 2), std::exception);
  EXPECT_NO_THROW(MajorantField::build_unchecked(h, 0.75));
}

TEST(Density, ConstantDensityGivesConstantMajorant) {
  const GridSpec g = GridSpec::covering(Box{Point{0.0}, Point{1.0}}, 0.05);
  const DensityField h(g, std::vector<double>(g.size(), 0.1), 0.01);
  const MajorantField H = MajorantField::build(h, 0.3, 2.0, 2);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_DOUBLE_EQ(H.at_node(i), 0.1);
}
