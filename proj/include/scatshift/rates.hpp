#pragma once

#include <span>
#include <string>
#include <vector>

#include "scatshift/lowsmooth.hpp"
#include "scatshift/nterm.hpp"
#include "scatshift/quasilinear.hpp"

namespace scatshift {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool defined = false;  ///< false with fewer than two positive data points
};

/// Least-squares fit of log y against log x over the pairs with x, y > 0.
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// ||f - S||_p over `box` by composite Gauss-Legendre, refined near the
/// singular point of f; p = infinity takes the maximum over the nodes.
double lp_error(const AnalyticTestFunction& f, const ScatteredApproximant& S, const Box& box, double p,
                const QuadratureSpec& quad);

/// Smallest box holding the support of f and all centers of S.
Box error_box(const AnalyticTestFunction& f, const ScatteredApproximant& S);

struct RatePoint {
  double x = 0.0;  ///< spacing h or budget N
  double error = 0.0;
  std::size_t centers = 0;
  double seconds = 0.0;
};

struct RateReport {
  std::string mode;     ///< "nterm", "linear" or "lowsmooth"
  std::string x_label;  ///< "h" or "N"
  double p = 2.0;
  std::vector<RatePoint> points;
  SlopeFit fit;
  double reference_slope = 0.0;

  /// x, error, centers, slope_to_date; timings are left out so reruns are byte-identical.
  std::string to_csv() const;
  /// Summary with the given resolved config embedded.
  std::string to_json(const std::string& config_json = "{}") const;
};

/// sigma_N study: N-term approximants for each budget and their L_p errors.
RateReport sigma_study(const AnalyticTestFunction& f, std::span<const long long> budgets, const NTermConfig& cfg,
                       const WaveletSystem& sys, const BasisFunction& phi, const QuadratureSpec& measure);

struct LinearLadder {
  std::vector<double> spacings;
  double pad = 0.5;          ///< centers cover the support of f grown by pad
  double panel_factor = 0.5; ///< assembly panel = factor * h
  int order = 3;
  double eval_factor = 0.5;  ///< error lattice spacing = factor * h, on the support of f
  double p = INFINITY;       ///< error exponent on the support lattice
};

/// Quasi-interpolant on uniform centers for each spacing; error on the support of f.
RateReport linear_study(const AnalyticTestFunction& f, const BasisFunction& phi, const ReproductionConfig& cfg,
                        const LinearLadder& ladder);

/// Uniform-center low-smoothness pipeline at equal budgets: for each N the
/// centers are a uniform lattice of about N points over the support of the
/// retained wavelet terms, and the L_p error is measured like sigma_study.
RateReport lowsmooth_budget_study(const AnalyticTestFunction& f, std::span<const long long> budgets,
                                  const NTermConfig& cfg, const WaveletSystem& sys, const BasisFunction& phi,
                                  const QuadratureSpec& measure);

}  // namespace scatshift
