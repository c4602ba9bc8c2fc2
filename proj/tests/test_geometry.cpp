#include <gtest/gtest.h>

#include <cmath>

#include "scatshift/geometry.hpp"
#include "scatshift/quadrature.hpp"
#include "scatshift/registry.hpp"

using namespace scatshift;

TEST(Geometry, GridCoversBoxWithNodesOnFaces) {
  const GridSpec g = GridSpec::covering(Box{Point{-0.25}, Point{1.0}}, 0.1);
  EXPECT_LE(g.spacing, 0.1);
  EXPECT_DOUBLE_EQ(g.node(0)[0], -0.25);
  EXPECT_NEAR(g.node(g.size() - 1)[0], 1.0, 1e-14);
}

TEST(Geometry, FlatIndexRoundTrip) {
  const GridSpec g = GridSpec::covering(Box::cube(3, 0.0, 1.0), 0.25);
  for (std::size_t i = 0; i < g.size(); i += 7) EXPECT_EQ(g.flat_index(g.multi_index(i)), i);
}

TEST(Geometry, BoxDistance) {
  const Box b = Box::unit(2);
  EXPECT_DOUBLE_EQ(b.distance_to(Point{0.5, 0.5}), 0.0);
  EXPECT_DOUBLE_EQ(b.distance_to(Point{4.0, 5.0}), 5.0);
}

TEST(Quadrature, GaussLegendreThreePoint) {
  // Closed form: nodes 0, +-sqrt(3/5); weights 8/9, 5/9.
  const auto r = gauss_legendre(3);
  ASSERT_EQ(r.nodes.size(), 3u);
  std::vector<double> n = r.nodes;
  std::sort(n.begin(), n.end());
  EXPECT_NEAR(n[0], -std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(n[1], 0.0, 1e-15);
  double w = 0.0;
  for (double x : r.weights) w += x;
  EXPECT_NEAR(w, 2.0, 1e-14);
}

TEST(Quadrature, CompositeRuleIsExactForPolynomials) {
  // order 4 integrates degree 7 exactly: int_0^3 x^7 dx = 3^8 / 8.
  const auto nodes = composite_rule(Box{Point{0.0}, Point{3.0}}, QuadratureSpec{0.4, 4, 0});
  double acc = 0.0;
  for (const auto& q : nodes) acc += q.weight * std::pow(q.t[0], 7);
  EXPECT_NEAR(acc, std::pow(3.0, 8) / 8.0, 1e-9);
}

TEST(Quadrature, SingularRefinementKeepsTotalWeight) {
  const auto nodes = composite_rule(Box::unit(2), QuadratureSpec{0.25, 3, 5}, Point{0.5, 0.5});
  double w = 0.0;
  for (const auto& q : nodes) w += q.weight;
  EXPECT_NEAR(w, 1.0, 1e-13);
}

TEST(Registry, ParsesSpecAndRejectsUnknownKeys) {
  const auto spec = TargetSpec::parse("bump:c=0.25,R=0.5");
  EXPECT_EQ(spec.name, "bump");
  EXPECT_DOUBLE_EQ(spec.params.at("c"), 0.25);
  EXPECT_THROW(make_target("bump:q=1", 1), std::exception);
  EXPECT_THROW(make_target("nosuch", 1), std::exception);
}

TEST(Registry, BumpClosedForm) {
  const auto f = make_target("bump:c=0.5,R=0.5", 1);
  EXPECT_DOUBLE_EQ(f(Point{0.5}), 1.0);
  // u = 0.5: exp(1 - 1/(1 - 0.25)) = exp(-1/3)
  EXPECT_NEAR(f(Point{0.75}), std::exp(-1.0 / 3.0), 1e-15);
  EXPECT_EQ(f(Point{1.2}), 0.0);
}

TEST(Registry, CuspVanishesAtCenterOnly) {
  const auto f = make_target("cusp:c=0.5,R=0.5,alpha=0.6", 1);
  EXPECT_EQ(f(Point{0.5}), 0.0);
  // |0.1|^0.6 exp(1 - 1/(1 - 0.04))
  EXPECT_NEAR(f(Point{0.55}), std::pow(0.05, 0.6) * std::exp(1.0 - 1.0 / 0.99), 1e-14);
  ASSERT_TRUE(f.singularity().has_value());
}
