#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "scatshift/nterm.hpp"

using namespace scatshift;

TEST(NTerm, IntegerRoot) {
  EXPECT_EQ(integer_root(27, 3), 3);
  EXPECT_EQ(integer_root(26, 3), 2);
  EXPECT_EQ(integer_root(1000000, 2), 1000);
  EXPECT_EQ(integer_root(999999, 2), 999);
  EXPECT_EQ(integer_root(7, 1), 7);
}

TEST(NTerm, DerivedExponents) {
  NTermConfig cfg;
  cfg.nu = 3.0;
  cfg.s = 2.0;
  cfg.p = 2.0;
  const auto phi = BasisFunction::truncated_power(2);
  EXPECT_EQ(cfg.degree(phi), 4);  // kappa - d + ceil(nu)
  EXPECT_EQ(cfg.n0(phi), 4);
  EXPECT_DOUBLE_EQ(cfg.tau(1), 0.4);
  EXPECT_DOUBLE_EQ(cfg.q(1), 1.0 / 3.0);
  const auto tps = BasisFunction::surface_spline(2, 2);
  cfg.nu = 4.5;
  EXPECT_EQ(cfg.n0(tps), 49);
  cfg.nu = 2.0;
  EXPECT_THROW(cfg.validate(phi), std::exception);  // nu must exceed 2d
}

TEST(NTerm, PartialSumRatio) {
  const std::vector<double> z{1, 2, 3, 4};
  EXPECT_NEAR(partial_sum_ratio(z, 1.0), 1.0, 1e-15);
  // Property: bounded by 1/eps for any non-negative series.
  std::mt19937_64 rng(8);
  std::exponential_distribution<double> ex(1.0);
  for (double eps : {0.1, 0.5, 0.9}) {
    std::vector<double> w(500);
    for (double& x : w) x = ex(rng);
    EXPECT_LE(partial_sum_ratio(w, eps), 1.0 / eps);
  }
}

TEST(NTerm, OrderPutsLargeCubesFirst) {
  EXPECT_TRUE(order_greater(WaveletIndex{0, 1, {0, 0, 0}}, WaveletIndex{1, 1, {0, 0, 0}}));
  EXPECT_FALSE(order_greater(WaveletIndex{2, 1, {0, 0, 0}}, WaveletIndex{1, 1, {5, 0, 0}}));
}

TEST(NTerm, LocalGridsShareBitwiseEqualPoints) {
  const WaveletSystem sys(1, 2, 0, 8);
  const auto a = local_grid(WaveletIndex{0, 1, {0, 0, 0}}, 9, sys, 4);
  const auto b = local_grid(WaveletIndex{1, 1, {0, 0, 0}}, 9, sys, 4);
  ASSERT_EQ(a.size(), 9u);
  std::set<double> sa;
  for (const auto& p : a) sa.insert(p[0]);
  std::size_t shared = 0;
  for (const auto& p : b)
    if (sa.count(p[0])) ++shared;
  EXPECT_EQ(shared, 5u);  // b covers [0, 1.5], a has spacing 3/8
  EXPECT_THROW(local_grid(WaveletIndex{0, 1, {0, 0, 0}}, 3, sys, 4), std::exception);
}

TEST(NTerm, SingleTermSeminormIsExact) {
  const WaveletSystem sys(1, 2, 0, 8);
  const auto s = sample_function([](const Point&) { return 0.0; }, Box{Point{0.0}, Point{1.0}}, 6, sys);
  WaveletExpansion e = decompose(s, sys, 0).zeros_like();
  e.set_coefficient(WaveletIndex{2, 1, {1, 0, 0}}, 0.25);
  // M = 2^(2 s) |c| on a support of length 3 / 4.
  const double s_ = 1.5, q = 0.4, tau = 0.5;
  EXPECT_NEAR(tl_seminorm_power(e, sys, s_, q, tau), std::pow(std::pow(4.0, s_) * 0.25, tau) * 0.75, 1e-13);
}

// Property: the per-wavelet error decays like N^(-kappa/d).
TEST(NTerm, WaveletApproximantConverges) {
  const auto phi = BasisFunction::truncated_power(2);
  const WaveletSystem sys = WaveletSystem::for_kappa(1, 2);
  NTermConfig cfg;
  cfg.nu = 3.0;
  cfg.s = 2.0;
  const WaveletIndex v{1, 1, {0, 0, 0}};
  const auto e1 = error_profile(v, wavelet_approximant(v, 64, sys, phi, cfg), sys, phi, cfg);
  const auto e2 = error_profile(v, wavelet_approximant(v, 256, sys, phi, cfg), sys, phi, cfg);
  EXPECT_NEAR(std::log2(e1.sup_error / e2.sup_error) / 2.0, 2.0, 0.4);
}

// Property: budget accounting holds on random targets, budgets and modes.
TEST(NTerm, BudgetAccounting) {
  const auto phi = BasisFunction::truncated_power(2);
  const WaveletSystem sys = WaveletSystem::for_kappa(1, 2);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> c(0.4, 0.6);
  ReferenceCache cache;
  for (int i = 0; i < 12; ++i) {
    NTermConfig cfg;
    cfg.nu = 3.0;
    cfg.s = 0.5 + 0.25 * (i % 6);
    cfg.fine_level = 10;
    cfg.budget_tight = i % 2 == 0;
    const auto f = make_target((i % 3 ? "cusp:R=0.4,c=" : "bump:R=0.3,c=") + std::to_string(c(rng)), 1);
    const long long N = 40 + static_cast<long long>(rng() % 600);
    const auto a = nterm_approximate(f, N, cfg, sys, phi, &cache);
    EXPECT_LE(a.allocation.total_cost, static_cast<double>(N));
    EXPECT_LE(a.allocation.total_n, N);
    EXPECT_LE(a.distinct_centers, static_cast<std::size_t>(N));
    EXPECT_EQ(a.S.size(), a.distinct_centers);
    long long sum_n = 0;
    for (const auto& e : a.allocation.entries) {
      EXPECT_TRUE(e.n == 0 || e.n >= a.allocation.n0);
      sum_n += e.n;
    }
    EXPECT_EQ(sum_n, a.allocation.total_n);
  }
}
