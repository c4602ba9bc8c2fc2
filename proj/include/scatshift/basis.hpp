#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scatshift/geometry.hpp"
#include "scatshift/jet.hpp"
#include "scatshift/quadrature.hpp"
#include "scatshift/registry.hpp"

namespace scatshift {

enum class BasisKind { SurfaceSpline, TruncatedPower };

/// Basis function phi with a local differential operator T such that
/// f = integral of Tf(t) phi(. - t) dt for compactly supported smooth f.
///
/// Surface spline: phi(x) = c_m |x|^(2m-d), times log|x| when 2m-d is even,
/// with T = Delta^m / (gamma c_m) where Delta^m |x|^(2m-d)[log|x|] = gamma delta.
/// Truncated power (d = 1): phi(x) = c x_+^(kappa-1), T = D^kappa / ((kappa-1)! c).
class BasisFunction {
 public:
  static BasisFunction surface_spline(int dim, int m, double c_m = 1.0);
  static BasisFunction truncated_power(int kappa, double c = 1.0);

  BasisKind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Order kappa of T (2m for surface splines).
  int kappa() const { return kappa_; }
  int m() const { return kappa_ / 2; }
  double constant() const { return c_; }
  bool log_branch() const { return log_branch_; }
  /// Homogeneity exponent kappa - d.
  int homogeneity() const { return kappa_ - dim_; }
  /// gamma for surface splines, (kappa-1)! for truncated powers.
  double fundamental_constant() const { return gamma_; }
  std::string describe() const;

  double operator()(const Point& x) const;
  /// Radial profile for surface splines, r >= 0.
  double radial(double r) const;
  /// Radial profile from the squared radius.
  double radial_from_r2(double r2) const;
  /// T applied to a jet of order >= kappa, at its expansion point.
  double apply_operator(const Jet& jet) const;

 private:
  BasisFunction(BasisKind kind, int dim, int kappa, double c, bool log_branch, double gamma);

  BasisKind kind_;
  int dim_;
  int kappa_;
  double c_;
  bool log_branch_;
  double gamma_;
};

/// gamma with Delta^m (|x|^(2m-d) [log|x|]) = gamma delta in R^d.
double surface_spline_gamma(int dim, int m);

double eval_basis(const BasisFunction& phi, const Point& x);
/// Tf(t); zero outside the support box of f. Requires f in C^kappa near t.
double apply_T(const BasisFunction& phi, const AnalyticTestFunction& f, const Point& t);

struct RepresentationCheck {
  std::vector<double> panels;
  std::vector<double> residuals;
  bool converged = false;
};

/// |f(x) - integral Tf(t) phi(x - t) dt| by composite Gauss-Legendre.
double representation_residual(const BasisFunction& phi, const AnalyticTestFunction& f, const Point& x,
                               const QuadratureSpec& quad);

/// Residuals over a ladder of halved panel widths. Throws ConvergenceFailure
/// when the residual stops decreasing before reaching `floor`.
RepresentationCheck verify_representation(const BasisFunction& phi, const AnalyticTestFunction& f, const Point& x,
                                          const QuadratureSpec& quad, int levels, double floor = 1e-12);

}  // namespace scatshift
