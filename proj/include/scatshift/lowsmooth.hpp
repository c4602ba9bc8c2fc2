#pragma once

#include "scatshift/density.hpp"
#include "scatshift/quasilinear.hpp"
#include "scatshift/wavelets.hpp"

namespace scatshift {

struct LowSmoothResult {
  ScatteredApproximant F;
  std::size_t plus_terms = 0;
  std::size_t minus_terms = 0;
  int node_level = 0;          ///< quadrature nodes on the 2^-node_level lattice
  std::size_t nodes = 0;       ///< nodes with nonzero T f_h^+
  Box node_box;                ///< bounding box of the supports of the retained terms
  double t_constant = 0.0;     ///< measured sup |T psi_v| l(v)^kappa over the retained types
};

/// Splits exp by the density h, keeps f_h^+ (l(v) >= h(v)) and assembles
/// F = integral T f_h^+(t) K(., t) dt on `centers`. T f_h^+ is evaluated from the
/// wavelet derivative tables on a dyadic lattice with spacing <= min h / 4 and at
/// least `extra_levels` finer than the finest retained level. f_h^- is left out.
LowSmoothResult approximate_low_smoothness(const WaveletExpansion& exp, const WaveletSystem& sys,
                                           const CenterSet& centers, const BasisFunction& phi,
                                           const ReproductionConfig& cfg, const DensityField& h, double s,
                                           int extra_levels = 3);

}  // namespace scatshift
