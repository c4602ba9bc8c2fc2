#pragma once

#include <optional>
#include <vector>

#include "scatshift/geometry.hpp"

namespace scatshift {

struct GaussLegendreRule {
  std::vector<double> nodes;    ///< on [-1, 1]
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

struct QuadratureNode {
  Point t;
  double weight;
};

/// Tensor Gauss-Legendre on a panel decomposition of a box.
struct QuadratureSpec {
  double panel = 1.0 / 16.0;  ///< target panel width; panels tile the box exactly
  int order = 4;              ///< points per axis per panel
  int singular_levels = 0;    ///< dyadic refinements of panels touching the singular point
};

/// Nodes and weights of the composite rule. When `singular` is given, every
/// panel whose closure contains it is split 2^d-fold `singular_levels` times.
std::vector<QuadratureNode> composite_rule(const Box& box, const QuadratureSpec& spec,
                                           const std::optional<Point>& singular = std::nullopt);

}  // namespace scatshift
