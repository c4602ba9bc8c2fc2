#include <gtest/gtest.h>

#include <random>

#include "scatshift/centers.hpp"
#include "scatshift/error.hpp"

using namespace scatshift;

TEST(Centers, UniformCountsAndSpacing) {
  const CenterSet cs = uniform_centers(Box{Point{0.0}, Point{1.0}}, 0.125);
  EXPECT_EQ(cs.size(), 9u);
  const CenterSet c2 = uniform_centers(Box::unit(2), 0.25);
  EXPECT_EQ(c2.size(), 25u);
}

TEST(Centers, TwoDensitySpacings) {
  const CenterSet cs = two_density_centers(Box{Point{0.0}, Point{2.0}}, 1.0 / 16, 4);
  const auto& p = cs.points();
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double gap = p[i][0] - p[i - 1][0];
    EXPECT_NEAR(gap, p[i][0] <= 1.0 ? 1.0 / 16 : 0.25, 1e-12) << p[i][0];
  }
  EXPECT_DOUBLE_EQ(p.front()[0], 0.0);
  EXPECT_DOUBLE_EQ(p.back()[0], 2.0);
}

TEST(Centers, SeededGeneratorsAreReproducible) {
  const Box b = Box::unit(2);
  EXPECT_EQ(random_centers(b, 50, 9).points(), random_centers(b, 50, 9).points());
  EXPECT_NE(random_centers(b, 50, 9).points(), random_centers(b, 50, 10).points());
  EXPECT_EQ(jittered_centers(b, 0.1, 0.3, 4).points(), jittered_centers(b, 0.1, 0.3, 4).points());
}

// Property: the bucket search agrees with exhaustive search, ties included.
TEST(Centers, NearestNeighboursMatchBruteForce) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  for (int d = 1; d <= 3; ++d) {
    for (const CenterSet& cs : {random_centers(Box::unit(d), 300, 17), uniform_centers(Box::unit(d), d == 3 ? 0.2 : 0.05)}) {
      for (int q = 0; q < 50; ++q) {
        Point t(d);
        for (int a = 0; a < d; ++a) t[a] = u(rng);
        const auto a = cs.k_nearest(t, 12), b = cs.k_nearest_brute(t, 12);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].index, b[i].index);
      }
    }
  }
}

TEST(Centers, CsvParsingAndErrors) {
  const CenterSet cs = parse_centers_csv("x0,x1\n0,0\n0.5,1\n");
  EXPECT_EQ(cs.dim(), 2);
  EXPECT_EQ(cs.size(), 2u);
  try {
    parse_centers_csv("x0\n0.1\n0.2\nfoo\n");
    FAIL() << "expected an error";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_centers_csv("x0\n0.1\n0.1\n"), IoError);  // duplicate
  EXPECT_THROW(parse_centers_csv("x0\n0.1,0.2\n"), IoError);
  EXPECT_THROW(parse_centers_csv("y\n0.1\n"), IoError);
  EXPECT_THROW(parse_centers_csv("x0\nnan\n"), IoError);
}

TEST(Centers, FillDistanceOfLattice) {
  const CenterSet cs = uniform_centers(Box{Point{0.0}, Point{1.0}}, 0.25);
  EXPECT_NEAR(cs.fill_distance(Box{Point{0.0}, Point{1.0}}, 1.0 / 64), 0.125, 1e-12);
}
