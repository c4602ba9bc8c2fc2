#pragma once

#include <span>
#include <string>
#include <vector>

#include "scatshift/basis.hpp"
#include "scatshift/density.hpp"
#include "scatshift/quadrature.hpp"
#include "scatshift/reproduction.hpp"

namespace scatshift {

/// F(x) = sum a(xi) phi(x - xi).
class ScatteredApproximant {
 public:
  ScatteredApproximant(BasisFunction phi, std::vector<Point> centers, std::vector<double> coeffs);

  const BasisFunction& basis() const { return phi_; }
  const std::vector<Point>& centers() const { return centers_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::size_t size() const { return centers_.size(); }

  double operator()(const Point& x) const;
  /// Batched evaluation; O((n + m) log n) for univariate truncated powers.
  std::vector<double> evaluate(std::span<const Point> xs) const;

  std::string to_json() const;
  void write_csv(const std::string& path) const;

 private:
  BasisFunction phi_;
  std::vector<Point> centers_;
  std::vector<double> coeffs_;
};

/// Quadrature node carrying the value of Tf.
struct SourceNode {
  Point t;
  double weight;
  double value;
};

struct AssemblyStats {
  std::size_t nodes = 0;
  std::size_t active_nodes = 0;
  std::size_t active_centers = 0;
  int max_enlargements = 0;
  double max_norm1 = 0.0;
  double min_radius = 0.0;
  double max_radius = 0.0;
};

/// a(xi) = sum_i w_i Tf(t_i) A(t_i, xi). Nodes with Tf = 0 are skipped; nodes
/// outside the bounding box of the centers are rejected.
ScatteredApproximant assemble_from_nodes(std::span<const SourceNode> nodes, const CenterSet& centers,
                                         const BasisFunction& phi, const ReproductionConfig& cfg,
                                         AssemblyStats* stats = nullptr);

/// Composite Gauss-Legendre over the support box of f.
std::vector<SourceNode> source_nodes(const AnalyticTestFunction& f, const BasisFunction& phi, const QuadratureSpec& quad);

ScatteredApproximant assemble(const AnalyticTestFunction& f, const CenterSet& centers, const BasisFunction& phi,
                              const ReproductionConfig& cfg, const QuadratureSpec& quad, AssemblyStats* stats = nullptr);

/// (sum |H^-s g|^p vol)^(1/p), or max |H^-s g| for p = infinity.
double weighted_norm(std::span<const double> g, std::span<const double> H, double s, double p, double cell_volume);

/// Weighted error certificate on a lattice: ||H^-s (f - F)||_p against
/// ||h^(kappa-s) Tf||_p, both by the same grid quadrature (grid sup for p = inf).
struct ErrorCertificate {
  double s = 0.0;
  double p = 0.0;
  double weighted_error = 0.0;
  double reference = 0.0;  ///< ||h^(kappa-s) Tf||_p
  double constant = 0.0;   ///< weighted_error / reference (0 when reference is 0)
  double sup_error = 0.0;  ///< unweighted grid sup of |f - F|
  double grid_spacing = 0.0;
  std::size_t grid_nodes = 0;
};

ErrorCertificate error_certificate(const AnalyticTestFunction& f, const ScatteredApproximant& F,
                                   const BasisFunction& phi, const MajorantField& H, double s, double p,
                                   const GridSpec& grid);

/// Grid sup of |f - F| over the lattice nodes inside `region`.
double local_sup_error(const AnalyticTestFunction& f, const ScatteredApproximant& F, const GridSpec& grid,
                       const Box& region);

/// Kernel used inside the Schur integrals: the measured |E(x,t)|, or its decay
/// bound C h(t)^(kappa-d) (1 + |x-t|/h(t))^(-nu) with h taken from the density.
enum class SchurKernel { Actual, DecayBound };

struct SchurSampling {
  GridSpec x_grid;
  GridSpec t_grid;
  SchurKernel kernel = SchurKernel::Actual;
  double bound_constant = 1.0;  ///< C for the decay-bound kernel
};

struct SchurReport {
  double row_sup = 0.0;  ///< sup_t int H(x)^-s |E(x,t)| h(t)^(s-kappa) dx
  double col_sup = 0.0;  ///< sup_x int H(x)^-s |E(x,t)| h(t)^(s-kappa) dt
  bool finite = false;
};

SchurReport schur_diagnostic(const CenterSet& centers, const BasisFunction& phi, const ReproductionConfig& cfg,
                             const MajorantField& H, double s, const SchurSampling& sampling);

/// Verdict over a ladder of Schur reports whose parameter doubles per step
/// (domain extent or density contrast).
struct SchurVerdict {
  bool pass = false;
  double growth = 0.0;  ///< fitted per-step ratio of successive increments
  std::string reason;
};

/// Increment ratio halfway (in exponent) between a divergent tail and the tail
/// left by the default majorant exponent: 2^(-(nu - d) / 20).
double schur_ratio_threshold(double nu, int dim);

/// The increments of max(row_sup, col_sup) over the last (up to) three steps are
/// fitted as A rho^k. Passes if the last step changed the value by at most
/// `settle` relative, or rho < max_increment_ratio.
SchurVerdict schur_verdict(std::span<const SchurReport> ladder, double max_increment_ratio = 0.966,
                           double settle = 0.02);

/// Univariate domain-extension ladder for the Schur diagnostic: fine centers
/// (spacing `fine`) on [-L, 0), spacings doubling from `fine` up to `coarse`,
/// then `coarse_count` centers at the coarse spacing. One lattice of spacing
/// `fine` serves as density grid and x, t samples. L runs through `extents`.
struct SchurLadderSpec {
  double fine = 1.0 / 16.0;
  double coarse = 4.0;
  int coarse_count = 9;
  std::vector<double> extents{4, 8, 16, 32, 64, 128, 256};
  SchurKernel kernel = SchurKernel::DecayBound;
};

struct SchurLadder {
  double r = 0.0;
  std::vector<double> extents;
  std::vector<SchurReport> reports;
  SchurVerdict verdict;
};

/// Runs the ladder for majorant exponent r (not checked against the admissible
/// range, so the failure side can be probed) with weight exponent s.
SchurLadder schur_ladder(const BasisFunction& phi, const ReproductionConfig& cfg, double r, double s,
                         const SchurLadderSpec& spec);

}  // namespace scatshift
