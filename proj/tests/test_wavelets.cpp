#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scatshift/daubechies.hpp"
#include "scatshift/wavelets.hpp"

using namespace scatshift;

TEST(Daubechies, Db2ClosedForm) {
  const DaubechiesFilter f(2);
  const double s3 = std::sqrt(3.0), n = 4 * std::sqrt(2.0);
  std::vector<double> expect{(1 + s3) / n, (3 + s3) / n, (3 - s3) / n, (1 - s3) / n};
  std::vector<double> h = f.lowpass();
  if (std::abs(h[0] - expect[0]) > 1e-8) std::reverse(h.begin(), h.end());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(h[i], expect[i], 1e-14);
}

// Properties: sum h = sqrt 2, double-shift orthonormality, vanishing moments.
TEST(Daubechies, FilterIdentities) {
  for (int N = 1; N <= 10; ++N) {
    const DaubechiesFilter f(N);
    const auto& h = f.lowpass();
    ASSERT_EQ(f.length(), 2 * N);
    double sum = 0.0;
    for (double x : h) sum += x;
    EXPECT_NEAR(sum, std::sqrt(2.0), 1e-13) << N;
    for (int m = 0; m < N; ++m) {
      double acc = 0.0;
      for (int k = 0; k + 2 * m < 2 * N; ++k) acc += h[k] * h[k + 2 * m];
      EXPECT_NEAR(acc, m == 0 ? 1.0 : 0.0, 1e-13) << N << " " << m;
    }
    EXPECT_LE(highpass_moment_defect(f), 1e-10) << N;
  }
}

TEST(Daubechies, FamilyForKappa) {
  EXPECT_EQ(vanishing_moments_for(2), 8);
  EXPECT_GE(daubechies_holder(vanishing_moments_for(3)), 3.5);
  EXPECT_EQ(WaveletSystem::for_kappa(1, 2).support_factor(), 15);
}

TEST(Refinable, Db2IntegerValues) {
  const WaveletSystem sys(1, 2, 0, 6);
  const auto& phi = sys.phi_table(0);
  const double s3 = std::sqrt(3.0);
  const double a = phi(1.0), b = phi(2.0);
  EXPECT_NEAR(std::min(a, b), (1 - s3) / 2, 1e-12);
  EXPECT_NEAR(std::max(a, b), (1 + s3) / 2, 1e-12);
}

// Properties: partition of unity and its derivatives summing to zero.
TEST(Refinable, PartitionOfUnity) {
  const WaveletSystem sys(1, 6, 2, 10);
  for (double y : {0.0, 0.125, 0.3, 0.71875}) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int k = 0; k <= sys.support_factor(); ++k) {
      s0 += sys.phi_table(0)(y + k);
      s1 += sys.phi_table(1)(y + k);
      s2 += sys.phi_table(2)(y + k);
    }
    const double tol = std::ldexp(y, 10) == std::floor(std::ldexp(y, 10)) ? 1e-10 : 1e-6;
    EXPECT_NEAR(s0, 1.0, tol) << y;
    EXPECT_NEAR(s1, 0.0, 1e3 * tol) << y;
    EXPECT_NEAR(s2, 0.0, 1e5 * tol) << y;
  }
}

TEST(Wavelets, PerfectReconstruction) {
  for (int d = 1; d <= 2; ++d) {
    const WaveletSystem sys(d, 3, 0, 8);
    const auto f = make_target("cosbump:c=0.5,R=0.4", d);
    const auto s = sample_function([&](const Point& x) { return f(x); }, f.support(), d == 1 ? 9 : 6, sys);
    const auto e = decompose(s, sys, 1);
    const auto back = reconstruct(e, sys);
    // Values of back on the original index box.
    double err = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i) {
      const Point x = back.point(i, sys.sample_offset());
      const double ref = f(x);
      if (f.support().contains(x)) err = std::max(err, std::abs(back.values[i] - ref));
    }
    EXPECT_LE(err, 1e-10) << d;
  }
}

// Property: details of a polynomial of degree < N vanish away from the ends.
TEST(Wavelets, AnnihilatesPolynomials) {
  const WaveletSystem sys(1, 3, 0, 8);
  const auto s = sample_function([](const Point& x) { return 1 + x[0] - 2 * x[0] * x[0]; },
                                 Box{Point{0.0}, Point{4.0}}, 7, sys);
  const auto e = decompose(s, sys, 5);
  for (const auto& b : e.blocks()) {
    if (b.type == 0) continue;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Box supp = sys.support(b.index(i, 1));
      if (supp.lo[0] > 0.6 && supp.hi[0] < 3.4) EXPECT_NEAR(b.values[i], 0.0, 1e-9);
    }
  }
}

TEST(Wavelets, OperatorScalesWithLevel) {
  const WaveletSystem sys = WaveletSystem::for_kappa(1, 2);
  const auto phi = BasisFunction::truncated_power(2);
  const WaveletIndex v0{0, 1, {0, 0, 0}}, v2{2, 1, {1, 0, 0}};
  for (double y : {0.5, 3.25, 7.0}) {
    const double a = sys.eval_T(phi, v0, Point{y});
    const double b = sys.eval_T(phi, v2, Point{(y + 1) / 4});
    EXPECT_NEAR(b, 16 * a, 1e-9 * (1 + std::abs(b)));
  }
  EXPECT_NEAR(sys.eval(v2, Point{(3.25 + 1) / 4}), sys.eval(v0, Point{3.25}), 1e-14);
}

TEST(Wavelets, MaximalFunctionOfSingleTerm) {
  const WaveletSystem sys(1, 2, 0, 8);
  const auto s = sample_function([](const Point&) { return 0.0; }, Box{Point{0.0}, Point{1.0}}, 6, sys);
  WaveletExpansion e = decompose(s, sys, 0).zeros_like();
  const WaveletIndex v{3, 1, {2, 0, 0}};
  e.set_coefficient(v, -0.5);
  EXPECT_EQ(e.nonzero(), 1u);
  // l(v)^-s |f_v| on supp v = [2/8, 5/8].
  EXPECT_NEAR(maximal_function(e, sys, 1.5, 1.0, Point{0.3}), std::pow(8.0, 1.5) * 0.5, 1e-12);
  EXPECT_EQ(maximal_function(e, sys, 1.5, 1.0, Point{0.7}), 0.0);
}

// Property: the density split is an exact partition of the coefficients.
TEST(Wavelets, DensitySplitPartitions) {
  const WaveletSystem sys(1, 4, 0, 8);
  const auto f = make_target("cusp:c=0.5,R=0.5,alpha=0.6", 1);
  const auto e = decompose(sample_function([&](const Point& x) { return f(x); }, f.support(), 10, sys), sys, 0);
  const GridSpec g = GridSpec::covering(Box{Point{-8.0}, Point{9.0}}, 1.0 / 64);
  std::vector<double> hv(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) hv[i] = g.node(i)[0] < 0.5 ? 1.0 / 512 : 1.0 / 32;
  const auto sp = split_by_density(e, sys, DensityField(g, hv, 1e-4));
  EXPECT_GT(sp.plus.nonzero(), 0u);
  EXPECT_GT(sp.minus.nonzero(), 0u);
  EXPECT_EQ(sp.plus.nonzero() + sp.minus.nonzero(), e.nonzero());
  for (const auto& t : e.terms()) {
    const double a = sp.plus.coefficient(t.v), b = sp.minus.coefficient(t.v);
    EXPECT_TRUE(a == 0.0 || b == 0.0);
    EXPECT_EQ(a + b, t.coeff);
    if (b != 0.0) EXPECT_LT(WaveletSystem::side(t.v), 1.0 / 32);
  }
}

TEST(Wavelets, TlNormOfZeroIsZero) {
  const WaveletSystem sys(1, 2, 0, 8);
  const auto e = decompose(sample_function([](const Point&) { return 0.0; }, Box{Point{0.0}, Point{1.0}}, 6, sys), sys, 0);
  const auto n = tl_norm(e, sys, 1.0, 2.0, 1.0, GridSpec::cell_centred(Box{Point{-3.0}, Point{4.0}}, 1.0 / 128));
  EXPECT_EQ(n.norm, 0.0);
}
