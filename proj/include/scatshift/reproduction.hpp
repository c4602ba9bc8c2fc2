#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scatshift/basis.hpp"
#include "scatshift/centers.hpp"

namespace scatshift {

/// Parameters of the local reproduction functionals.
struct ReproductionConfig {
  int degree = 1;             ///< n: reproduce polynomials of total degree < n
  double nu = 3.0;            ///< decay order, n = kappa - d + nu
  int extra_points = 0;       ///< points beyond dim P_{<n} in the initial selection
  double c_max = 0.0;         ///< admissible l1 norm; 0 means 10 dim P_{<n}
  int enlargement_cap = 0;    ///< extra points allowed by enlargement; 0 means 3 dim P_{<n}
  double rank_tol = 1e-11;

  /// n = kappa - d + ceil(nu); nu must exceed d.
  static ReproductionConfig for_basis(const BasisFunction& phi, double nu, int extra_points = 0);
  static double default_nu(int dim) { return 2.0 * dim + 1.0; }

  std::size_t poly_dim(int dim) const;
  double norm_bound(int dim) const;
  std::size_t max_points(int dim) const;
  void validate(int dim) const;
};

/// Number of monomials of total degree < n in d variables.
std::size_t poly_dim(int dim, int n);

struct FunctionalTerm {
  std::size_t index;  ///< position in the center set
  Point center;
  double coeff;
};

/// lambda_t(g) = sum A(t, xi) g(xi), reproducing p(t) for deg p < n.
struct ReproducingFunctional {
  Point anchor;
  std::vector<FunctionalTerm> terms;
  double radius = 0.0;  ///< h(t): max |xi - t| over the support
  double norm1 = 0.0;
  int degree = 0;
  int enlargements = 0;

  /// max over scaled monomials z^alpha, z = (x - t)/radius, of |lambda(z^alpha) - delta_alpha0|.
  double reproduction_residual() const;
};

ReproducingFunctional build_functional(const CenterSet& centers, const Point& t, const ReproductionConfig& cfg);

/// Univariate scheme from the divided difference on {t, xi_1..xi_kappa}:
/// a(t) phi(x - t) - sum A0(t, xi) phi(x - xi) = M(x) with M the B-spline
/// [t, xi_1..xi_kappa](x - .)_+^(kappa-1).
struct DividedDifferenceScheme {
  Point anchor;
  int kappa = 0;
  std::vector<double> knots;    ///< t first, then xi_1..xi_kappa
  std::vector<double> weights;  ///< divided-difference weights, same order
  std::vector<std::size_t> indices;
  double radius = 0.0;

  double a() const { return weights[0]; }
  /// B-spline M(x).
  double bspline(double x) const;
  ReproducingFunctional functional() const;
};

/// kappa nearest centers distinct from t.
DividedDifferenceScheme divided_difference_scheme(const CenterSet& centers, const Point& t, int kappa);

/// E(x, t) = phi(x - t) - sum A(t, xi) phi(x - xi).
double error_kernel_eval(const ReproducingFunctional& lambda, const BasisFunction& phi, const Point& x);

enum class SchemeKind { LeastNorm, DividedDifference };

struct A4Sampling {
  Box anchor_box;
  std::size_t anchors = 48;
  std::size_t radii = 40;
  std::size_t directions = 6;
  double max_ratio = 128.0;  ///< largest |x - t| / h(t) sampled
  std::uint64_t seed = 1;
  double stability = 0.2;    ///< allowed relative change of C_meas under refinement
};

struct A4Certificate {
  double c_meas = 0.0;
  std::vector<double> c_levels;  ///< coarse, refined
  bool stable = false;
  Point worst_t;
  Point worst_x;
  std::size_t samples = 0;
};

/// C_meas = sup |E(x,t)| / (h(t)^(kappa-d) (1 + |x-t|/h(t))^(-nu)) over sampled pairs,
/// at the given sampling and once refined (all counts doubled).
A4Certificate a4_certificate(const CenterSet& centers, const BasisFunction& phi, const ReproductionConfig& cfg,
                             const A4Sampling& sampling, SchemeKind scheme = SchemeKind::LeastNorm);

std::string functional_to_json(const ReproducingFunctional& lambda);

}  // namespace scatshift
