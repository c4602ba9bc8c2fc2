#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "scatshift/basis.hpp"
#include "scatshift/quasilinear.hpp"
#include "scatshift/registry.hpp"
#include "scatshift/wavelets.hpp"

namespace scatshift {

struct NTermConfig {
  double nu = 3.0;         ///< decay exponent of the per-wavelet grids, > 2d
  double s = 1.0;          ///< target smoothness, 0 < s <= kappa
  double p = 2.0;          ///< error exponent in [1, infinity)
  int base_level = 0;      ///< j0
  int fine_level = 12;     ///< J: sampling level of the target
  int quad_level = 0;      ///< dyadic quadrature resolution on the reference cube; 0 picks by dimension
  int extra_points = 0;
  bool budget_tight = false;  ///< a = N / sum(raw costs) instead of N / ||f||^tau

  double tau(int dim) const { return 1.0 / (1.0 / p + s / dim); }
  double q(int dim) const { return 1.0 / (1.0 + s / dim); }
  /// Polynomial degree bound n = kappa - d + ceil(nu).
  int degree(const BasisFunction& phi) const;
  /// N0 = n^d.
  long long n0(const BasisFunction& phi) const;
  int quadrature_level(int dim) const;
  ReproductionConfig reproduction(const BasisFunction& phi) const;
  void validate(const BasisFunction& phi) const;
};

/// Largest m with m^d <= n.
long long integer_root(long long n, int d);

/// m^d vertices of the uniform grid on the support box of v, m = floor(N^(1/d)).
/// Coordinates are 2^-j (k (m-1) + A0 i) / (m-1), so equal points from different
/// grids are bitwise equal.
std::vector<Point> local_grid(const WaveletIndex& v, long long N, const WaveletSystem& sys, long long n0);

struct WaveletApproximant {
  ScatteredApproximant S;
  long long n = 0;  ///< budget N_v
  long long m = 0;  ///< grid points per axis
  std::size_t nodes = 0;
};

/// S_(v,N) = integral of T psi_v(t) K(., t) over the support box of v, with K built
/// on local_grid(v, N). Quadrature uses the exact dyadic table values of T psi.
WaveletApproximant wavelet_approximant(const WaveletIndex& v, long long N, const WaveletSystem& sys,
                                       const BasisFunction& phi, const NTermConfig& cfg);

struct ErrorProfile {
  double sup_error = 0.0;    ///< sup |psi_v - S|
  double normalized = 0.0;   ///< sup |psi_v - S| N^(kappa/d) (1 + dist/l)^(nu-d)
  double tail_slope = 0.0;   ///< log-log slope of the error outside the support (NaN when it vanishes)
  std::vector<double> dist;  ///< dist(x, support) / l(v) of the samples outside the support
  std::vector<double> error; ///< |psi_v - S| at those samples
};

/// Samples on the support box grown by `grow` support lengths on each side,
/// `per_unit` points per unit of local coordinate.
ErrorProfile error_profile(const WaveletIndex& v, const WaveletApproximant& wa, const WaveletSystem& sys,
                           const BasisFunction& phi, const NTermConfig& cfg, double grow = 1.0, int per_unit = 64);

struct CostEntry {
  WaveletIndex v;
  double coeff = 0.0;  ///< f_v
  double m_qv = 0.0;   ///< M_(q,v)
  double cost = 0.0;   ///< c_v
  long long n = 0;     ///< N_v = floor(c_v), 0 when c_v < N0
};

struct CostAllocation {
  long long budget = 0;
  long long n0 = 0;
  double a = 0.0;
  double norm_tau = 0.0;  ///< ||f||^tau of the F^s_(tau,q) seminorm (or raw cost sum when budget-tight)
  double total_cost = 0.0;
  long long total_n = 0;
  bool rescaled = false;  ///< a was lowered to absorb rounding
  std::vector<CostEntry> entries;
};

/// Order on V_x: larger cubes first, then larger type. Ties across positions
/// break lexicographically on k so the order is total on all of V.
bool order_greater(const WaveletIndex& a, const WaveletIndex& b);

/// M_(q,v)^q for every nonzero term, from cumulative sums down the dyadic tree.
std::vector<double> ordered_partial_sums(const WaveletExpansion& exp, double s, double q);

/// integral of M_(s,q)(f)^tau, exact for the piecewise constant maximal function.
double tl_seminorm_power(const WaveletExpansion& exp, const WaveletSystem& sys, double s, double q, double tau);

CostAllocation allocate(const WaveletExpansion& exp, long long N, const NTermConfig& cfg, const WaveletSystem& sys,
                        const BasisFunction& phi);

struct Contribution {
  WaveletIndex v;
  long long n = 0;
  long long m = 0;
  std::size_t centers = 0;
};

struct NTermApproximant {
  ScatteredApproximant S;
  std::vector<Contribution> contributions;
  CostAllocation allocation;
  std::size_t raw_centers = 0;       ///< sum of grid sizes m^d
  std::size_t distinct_centers = 0;
  std::size_t skipped_terms = 0;
  double skipped_coefficient_sum = 0.0;  ///< sum |f_v| over skipped terms

  std::string to_json() const;
};

/// Cache of reference approximants at level 0, keyed by (type, m).
class ReferenceCache {
 public:
  const WaveletApproximant& get(int type, long long m, const WaveletSystem& sys, const BasisFunction& phi,
                                const NTermConfig& cfg);
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    int type;
    long long m;
    WaveletApproximant wa;
  };
  std::vector<Entry> entries_;
};

NTermApproximant nterm_approximate(const WaveletExpansion& exp, long long N, const NTermConfig& cfg,
                                   const WaveletSystem& sys, const BasisFunction& phi, ReferenceCache* cache = nullptr);

/// Samples f at cfg.fine_level over its support box and decomposes to cfg.base_level.
WaveletExpansion expand_target(const AnalyticTestFunction& f, const NTermConfig& cfg, const WaveletSystem& sys);

NTermApproximant nterm_approximate(const AnalyticTestFunction& f, long long N, const NTermConfig& cfg,
                                   const WaveletSystem& sys, const BasisFunction& phi, ReferenceCache* cache = nullptr);

/// sum z_j / Z_j^(1-eps) divided by Z^eps for a non-negative series in the given order.
double partial_sum_ratio(std::span<const double> z, double eps);

}  // namespace scatshift
