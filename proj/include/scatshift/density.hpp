#pragma once

#include <span>
#include <string>
#include <vector>

#include "scatshift/reproduction.hpp"

namespace scatshift {

/// Local density h sampled on a lattice; off-lattice values use the nearest node.
class DensityField {
 public:
  DensityField(GridSpec grid, std::vector<double> values, double h_min);

  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double h_min() const { return h_min_; }
  double at_node(std::size_t i) const { return values_[i]; }
  double operator()(const Point& x) const;
  double max() const;
  double min() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
  double h_min_;
};

/// h(t) = radius of the functional anchored at each node, floored at h_min
/// (default grid spacing / 4). One scheme per node, in node order.
DensityField density_from_schemes(std::span<const ReproducingFunctional> schemes, const GridSpec& grid,
                                  double h_min = 0.0);

/// Builds one functional per node and returns the density.
DensityField build_density(const CenterSet& centers, const ReproductionConfig& cfg, const GridSpec& grid,
                           double h_min = 0.0);

/// Largest admissible majorant exponent (nu - d) / kappa.
double majorant_exponent_bound(double nu, int dim, int kappa);
/// Default r = 0.9 (nu - d) / kappa.
double default_majorant_exponent(double nu, int dim, int kappa);

/// H(x) = sup_t h(t) (1 + |x - t| / h(t))^(-r) over the lattice nodes and t = x.
class MajorantField {
 public:
  /// Checks 0 < r < (nu - d)/kappa.
  static MajorantField build(const DensityField& h, double r, double nu, int kappa);
  /// No check on r; used to probe the failure side of the Schur bounds.
  static MajorantField build_unchecked(const DensityField& h, double r);

  double r() const { return r_; }
  const DensityField& density() const { return h_; }
  /// Exact supremum at x (lattice nodes plus x itself).
  double operator()(const Point& x) const;
  double at_node(std::size_t i) const { return node_values_[i]; }
  const std::vector<double>& node_values() const { return node_values_; }
  /// Slack in H(x) >= H(y)(1 + |x-y|/H(y))^(-r) caused by nearest-node lookup of h(x).
  double tol_disc() const { return tol_disc_; }

 private:
  MajorantField(const DensityField& h, double r);
  DensityField h_;
  double r_;
  double h_max_;
  std::vector<double> node_values_;
  double tol_disc_ = 0.0;
};

void write_field_csv(const GridSpec& grid, std::span<const double> values, const std::string& column,
                     const std::string& path);

}  // namespace scatshift
