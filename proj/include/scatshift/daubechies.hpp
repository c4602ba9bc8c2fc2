#pragma once

#include <vector>

namespace scatshift {

/// Orthonormal compactly supported Daubechies filter with N vanishing moments.
/// Low-pass h has length 2N, sum h = sqrt(2); g_k = (-1)^k h_(2N-1-k).
/// phi and psi are supported on [0, 2N-1].
class DaubechiesFilter {
 public:
  explicit DaubechiesFilter(int vanishing_moments);

  int vanishing_moments() const { return n_; }
  int length() const { return static_cast<int>(h_.size()); }
  /// Support length 2N - 1 of phi and psi.
  int support() const { return length() - 1; }
  const std::vector<double>& lowpass() const { return h_; }
  const std::vector<double>& highpass() const { return g_; }

 private:
  int n_;
  std::vector<double> h_;
  std::vector<double> g_;
};

/// Largest |sum_k ((k - c)/(L - 1))^j g_k| over j < N, c = (L - 1)/2; zero in
/// exact arithmetic for a filter with N vanishing moments.
double highpass_moment_defect(const DaubechiesFilter& filter);

/// Known lower estimates of the Hölder exponent of the Daubechies scaling function.
double daubechies_holder(int vanishing_moments);

/// Smallest N whose scaling function has Hölder exponent >= kappa + margin,
/// so that phi, psi are kappa times differentiable with bounded derivatives.
int vanishing_moments_for(int kappa, double margin = 0.5);

/// Samples of phi^(k) or psi^(k) at the dyadic points j 2^-R on [0, 2N-1].
class RefinableTable {
 public:
  RefinableTable() = default;
  RefinableTable(std::vector<double> values, int resolution, int support);

  int resolution() const { return resolution_; }
  int support() const { return support_; }
  const std::vector<double>& values() const { return values_; }
  /// Exact at dyadic points of the table, 4-point Lagrange in between, 0 outside the support.
  double operator()(double y) const;
  double sup_abs() const;

 private:
  std::vector<double> values_;
  int resolution_ = 0;
  int support_ = 0;
};

/// Derivative tables of order 0..max_order for phi and psi at resolution R.
/// Values at integers solve the refinement eigenproblem exactly; finer
/// dyadic points follow from the two-scale relation.
struct RefinableTables {
  std::vector<RefinableTable> phi;
  std::vector<RefinableTable> psi;
};

RefinableTables build_refinable_tables(const DaubechiesFilter& filter, int max_order, int resolution);

}  // namespace scatshift
