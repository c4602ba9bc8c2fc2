#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scatshift/basis.hpp"
#include "scatshift/daubechies.hpp"
#include "scatshift/density.hpp"
#include "scatshift/geometry.hpp"

namespace scatshift {

using IntVec = std::array<std::int64_t, kMaxDim>;

/// Dyadic index v = (j, k, e). Type e = 0 marks a coarse scaling term at the
/// base level; for e > 0 bit i selects psi (set) or phi (clear) along axis i.
struct WaveletIndex {
  int level = 0;
  int type = 0;
  IntVec k{0, 0, 0};

  friend bool operator==(const WaveletIndex&, const WaveletIndex&) = default;
};

bool operator<(const WaveletIndex& a, const WaveletIndex& b);

/// Tensor-product Daubechies system in d <= 3 dimensions with derivative tables.
class WaveletSystem {
 public:
  WaveletSystem(int dim, int vanishing_moments, int max_derivative, int resolution = 10);
  /// Family chosen from kappa (see vanishing_moments_for).
  static WaveletSystem for_kappa(int dim, int kappa, int resolution = 10);

  int dim() const { return dim_; }
  int types() const { return (1 << dim_) - 1; }
  const DaubechiesFilter& filter() const { return filter_; }
  int vanishing_moments() const { return filter_.vanishing_moments(); }
  int max_derivative() const { return max_derivative_; }
  int resolution() const { return resolution_; }
  /// Support length A0 = 2N - 1 in units of the cube side.
  int support_factor() const { return filter_.support(); }
  /// First moment of phi; samples for decomposition sit at 2^-J (k + mu).
  double sample_offset() const { return mu_; }

  const RefinableTable& phi_table(int deriv) const { return tables_.phi.at(static_cast<std::size_t>(deriv)); }
  const RefinableTable& psi_table(int deriv) const { return tables_.psi.at(static_cast<std::size_t>(deriv)); }

  static double side(const WaveletIndex& v) { return std::ldexp(1.0, -v.level); }
  double volume(const WaveletIndex& v) const { return std::ldexp(1.0, -v.level * dim_); }
  /// I_v = 2^-j (k + [0,1]^d).
  Box cube(const WaveletIndex& v) const;
  /// Support box 2^-j (k + [0, A0]^d).
  Box support(const WaveletIndex& v) const;

  /// L_infinity-normalised psi_v(x) = prod_i g_i(2^j x_i - k_i).
  double eval(const WaveletIndex& v, const Point& x) const;
  /// Partial derivative D^alpha psi_v(x).
  double eval_derivative(const WaveletIndex& v, const MultiIndex& alpha, const Point& x) const;
  /// T psi_v(x).
  double eval_T(const BasisFunction& phi, const WaveletIndex& v, const Point& x) const;
  /// Reference-level value g(y) in local coordinates y = 2^j x - k.
  double eval_local(int type, bool coarse, const MultiIndex& alpha, const Point& y) const;
  /// T psi at level 0, translate 0, evaluated at local y; T psi_v(x) = 2^(j kappa) T psi_ref(2^j x - k).
  double eval_T_local(const BasisFunction& phi, int type, bool coarse, const Point& y) const;

 private:
  int dim_;
  int max_derivative_;
  int resolution_;
  DaubechiesFilter filter_;
  RefinableTables tables_;
  double mu_ = 0.0;
};

/// Samples s_k at x_k = 2^-J (k + mu) on an index box.
struct DyadicSamples {
  int dim = 1;
  int level = 0;
  IntVec lo{0, 0, 0};
  IntVec count{1, 1, 1};
  std::vector<double> values;

  std::size_t size() const;
  Point point(std::size_t flat, double mu) const;
};

/// Coefficient block for one (level, type) over an index box.
struct CoefficientBlock {
  int level = 0;
  int type = 0;
  IntVec lo{0, 0, 0};
  IntVec count{1, 1, 1};
  std::vector<double> values;  ///< L_infinity-normalised f_v

  std::size_t size() const { return values.size(); }
  WaveletIndex index(std::size_t flat, int dim) const;
};

struct WaveletTerm {
  WaveletIndex v;
  double coeff;
};

/// Inhomogeneous expansion f = sum_k f_(j0,k) phi_(j0,k) + sum_(j0 <= j < J) sum_e,k f_v psi_v.
class WaveletExpansion {
 public:
  WaveletExpansion() = default;
  WaveletExpansion(int dim, int base_level, int fine_level, int vanishing_moments, std::vector<CoefficientBlock> blocks);

  int dim() const { return dim_; }
  int base_level() const { return j0_; }
  int fine_level() const { return J_; }
  int vanishing_moments() const { return n_; }
  const std::vector<CoefficientBlock>& blocks() const { return blocks_; }
  std::vector<CoefficientBlock>& blocks() { return blocks_; }

  /// All terms with nonzero coefficient, in block order.
  std::vector<WaveletTerm> terms() const;
  std::size_t nonzero() const;
  /// Same layout, all coefficients zero.
  WaveletExpansion zeros_like() const;
  double coefficient(const WaveletIndex& v) const;
  void set_coefficient(const WaveletIndex& v, double value);

  /// Evaluate sum f_v psi_v at x.
  double eval(const WaveletSystem& sys, const Point& x) const;

  std::string to_json() const;

 private:
  int dim_ = 1;
  int j0_ = 0;
  int J_ = 0;
  int n_ = 0;
  std::vector<CoefficientBlock> blocks_;
};

/// Samples of f at 2^-J (k + mu) over all k with the sample inside box (grown to full support).
DyadicSamples sample_function(const std::function<double(const Point&)>& f, const Box& box, int level,
                              const WaveletSystem& sys);

/// Whole-line fast wavelet transform with zero extension, level J down to j0.
WaveletExpansion decompose(const DyadicSamples& samples, const WaveletSystem& sys, int base_level);
/// Inverse of decompose; samples over the full index range reached by the synthesis.
DyadicSamples reconstruct(const WaveletExpansion& expansion, const WaveletSystem& sys);

/// M_(s,q)(x) = || (l(v)^-s |f_v| chi_(supp v)(x))_v ||_(l_q); q = infinity gives the sup.
double maximal_function(const WaveletExpansion& expansion, const WaveletSystem& sys, double s, double q, const Point& x);

struct TlNorm {
  double seminorm = 0.0;  ///< || M_(s,q) ||_(L_p)
  double norm = 0.0;      ///< seminorm + || f ||_(L_p)
};

/// Grid quadrature on a cell-centred lattice. The L_p norm of f uses the reconstructed samples.
TlNorm tl_norm(const WaveletExpansion& expansion, const WaveletSystem& sys, double s, double p, double q,
               const GridSpec& grid);

struct DensitySplit {
  WaveletExpansion plus;   ///< l(v) >= h(v), plus all coarse terms
  WaveletExpansion minus;  ///< l(v) < h(v)
};

/// h(v) = max of h over the support box of v.
DensitySplit split_by_density(const WaveletExpansion& expansion, const WaveletSystem& sys, const DensityField& h);

}  // namespace scatshift
