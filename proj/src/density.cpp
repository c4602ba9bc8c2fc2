#include "scatshift/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "scatshift/error.hpp"

namespace scatshift {

DensityField::DensityField(GridSpec grid, std::vector<double> values, double h_min)
    : grid_(grid), values_(std::move(values)), h_min_(h_min) {
  grid_.validate();
  if (values_.size() != grid_.size()) throw InvalidArgument("density values do not match the grid size");
  if (!(h_min_ > 0.0)) throw InvalidArgument("density floor must be positive");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!(values_[i] >= h_min_) || !std::isfinite(values_[i]))
      throw InvalidArgument("density value at node " + std::to_string(i) + " is below the floor or not finite");
}

double DensityField::operator()(const Point& x) const { return values_[grid_.flat_index(grid_.nearest(x))]; }

double DensityField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double DensityField::min() const { return *std::min_element(values_.begin(), values_.end()); }

DensityField density_from_schemes(std::span<const ReproducingFunctional> schemes, const GridSpec& grid, double h_min) {
  grid.validate();
  if (h_min <= 0.0) h_min = grid.spacing / 4.0;
  if (schemes.size() != grid.size())
    throw InvalidArgument("density needs one scheme per grid node: got " + std::to_string(schemes.size()) + " for " +
                          std::to_string(grid.size()) + " nodes");
  std::vector<double> h(grid.size());
  const double tol = 1e-9 * grid.spacing;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (distance(schemes[i].anchor, grid.node(i)) > tol)
      throw InvalidArgument("missing scheme at grid node " + std::to_string(i) + " " + grid.node(i).to_string());
    double r = 0.0;
    for (const auto& t : schemes[i].terms) r = std::max(r, distance(t.center, schemes[i].anchor));
    h[i] = std::max(r, h_min);
  }
  return DensityField(grid, std::move(h), h_min);
}

DensityField build_density(const CenterSet& centers, const ReproductionConfig& cfg, const GridSpec& grid, double h_min) {
  std::vector<ReproducingFunctional> schemes;
  schemes.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) schemes.push_back(build_functional(centers, grid.node(i), cfg));
  return density_from_schemes(schemes, grid, h_min);
}

double majorant_exponent_bound(double nu, int dim, int kappa) { return (nu - dim) / kappa; }

double default_majorant_exponent(double nu, int dim, int kappa) { return 0.9 * majorant_exponent_bound(nu, dim, kappa); }

MajorantField::MajorantField(const DensityField& h, double r) : h_(h), r_(r), h_max_(h.max()) {
  const GridSpec& g = h_.grid();
  node_values_.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) node_values_[i] = (*this)(g.node(i));
  const double half_diag = 0.5 * g.spacing * std::sqrt(static_cast<double>(g.dim()));
  for (double v : h_.values()) tol_disc_ = std::max(tol_disc_, v * (1.0 - std::pow(1.0 + half_diag / v, -r_)));
}

MajorantField MajorantField::build(const DensityField& h, double r, double nu, int kappa) {
  const double bound = majorant_exponent_bound(nu, h.grid().dim(), kappa);
  if (!(r > 0.0 && r < bound))
    throw InvalidArgument("majorant exponent r = " + std::to_string(r) + " outside (0, " + std::to_string(bound) + ")");
  return MajorantField(h, r);
}

MajorantField MajorantField::build_unchecked(const DensityField& h, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("majorant exponent must be positive");
  return MajorantField(h, r);
}

double MajorantField::operator()(const Point& x) const {
  const GridSpec& g = h_.grid();
  double best = h_(x);
  // h (1 + rho/h)^(-r) is increasing in h, so nodes farther than rho_cut cannot win.
  const double rho_cut = h_max_ * (std::pow(h_max_ / best, 1.0 / r_) - 1.0);
  std::array<std::int64_t, kMaxDim> lo{0, 0, 0}, hi{0, 0, 0};
  for (int i = 0; i < g.dim(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    lo[u] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((x[i] - rho_cut - g.origin[i]) / g.spacing)));
    hi[u] = std::min<std::int64_t>(g.counts[u] - 1, static_cast<std::int64_t>(std::ceil((x[i] + rho_cut - g.origin[i]) / g.spacing)));
    if (lo[u] > hi[u]) return best;
  }
  std::array<std::int64_t, kMaxDim> c = lo;
  while (true) {
    const std::size_t f = g.flat_index(c);
    const double ht = h_.at_node(f);
    const double v = ht * std::pow(1.0 + distance(x, g.node(f)) / ht, -r_);
    best = std::max(best, v);
    int axis = 0;
    while (axis < g.dim()) {
      const auto u = static_cast<std::size_t>(axis);
      if (++c[u] <= hi[u]) break;
      c[u] = lo[u];
      ++axis;
    }
    if (axis == g.dim()) break;
  }
  return best;
}

void write_field_csv(const GridSpec& grid, std::span<const double> values, const std::string& column,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (int i = 0; i < grid.dim(); ++i) out << "x" << i << ",";
  out << column << '\n';
  char buf[64];
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const Point p = grid.node(n);
    for (int i = 0; i < grid.dim(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,", p[i]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", values[n]);
    out << buf << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace scatshift
