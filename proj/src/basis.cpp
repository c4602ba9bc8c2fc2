#include "scatshift/basis.hpp"

#include <algorithm>

#include <cmath>
#include <numbers>
#include <sstream>

#include "scatshift/error.hpp"

namespace scatshift {

double surface_spline_gamma(int dim, int m) {
  if (dim < 1 || m < 1 || 2 * m <= dim) throw InvalidArgument("surface spline requires 2m > d");
  const int b0 = 2 * m - dim;
  const bool log_branch = b0 % 2 == 0;
  // Track c_log r^b log r + c_plain r^b under Delta, which maps
  // r^b log r -> b(b+d-2) r^(b-2) log r + (2b+d-2) r^(b-2) and r^b -> b(b+d-2) r^(b-2).
  double c_log = log_branch ? 1.0 : 0.0;
  double c_plain = log_branch ? 0.0 : 1.0;
  int b = b0;
  for (int step = 0; step < m - 1; ++step) {
    const double k = static_cast<double>(b) * (b + dim - 2);
    const double next_plain = k * c_plain + (2.0 * b + dim - 2) * c_log;
    c_log = k * c_log;
    c_plain = next_plain;
    b -= 2;
  }
  // Now b = 2 - d: the fundamental solution of Delta itself.
  if (dim == 2) return 2.0 * std::numbers::pi * c_log;
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
  return -(dim - 2.0) * sphere * c_plain;
}

BasisFunction::BasisFunction(BasisKind kind, int dim, int kappa, double c, bool log_branch, double gamma)
    : kind_(kind), dim_(dim), kappa_(kappa), c_(c), log_branch_(log_branch), gamma_(gamma) {}

BasisFunction BasisFunction::surface_spline(int dim, int m, double c_m) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("surface spline dimension must be in [1, 3]");
  if (m < 1 || 2 * m <= dim) throw InvalidArgument("surface spline requires 2m > d");
  if (!(c_m != 0.0) || !std::isfinite(c_m)) throw InvalidArgument("surface spline constant must be finite and nonzero");
  return BasisFunction(BasisKind::SurfaceSpline, dim, 2 * m, c_m, (2 * m - dim) % 2 == 0, surface_spline_gamma(dim, m));
}

BasisFunction BasisFunction::truncated_power(int kappa, double c) {
  if (kappa < 1) throw InvalidArgument("truncated power requires kappa >= 1");
  if (!(c != 0.0) || !std::isfinite(c)) throw InvalidArgument("truncated power constant must be finite and nonzero");
  return BasisFunction(BasisKind::TruncatedPower, 1, kappa, c, false, std::tgamma(static_cast<double>(kappa)));
}

std::string BasisFunction::describe() const {
  std::ostringstream os;
  if (kind_ == BasisKind::SurfaceSpline) os << "surface-spline(d=" << dim_ << ",m=" << m() << ")";
  else os << "truncated-power(kappa=" << kappa_ << ")";
  return os.str();
}

double BasisFunction::radial(double r) const {
  const int b = kappa_ - dim_;
  if (r == 0.0) return 0.0;
  double v = b == 0 ? 1.0 : std::pow(r, b);
  if (log_branch_) v *= std::log(r);
  return c_ * v;
}

double BasisFunction::radial_from_r2(double r2) const {
  if (r2 == 0.0) return 0.0;
  const int b = kappa_ - dim_;
  double v = 1.0;
  for (int k = 0; k < b / 2; ++k) v *= r2;
  if (b % 2) v *= std::sqrt(r2);
  if (log_branch_) v *= 0.5 * std::log(r2);
  return c_ * v;
}

double BasisFunction::operator()(const Point& x) const {
  if (x.dim() != dim_) throw InvalidArgument("basis evaluated at a point of the wrong dimension");
  if (kind_ == BasisKind::TruncatedPower) {
    if (x[0] <= 0.0) return 0.0;
    return kappa_ == 1 ? c_ : c_ * std::pow(x[0], kappa_ - 1);
  }
  return radial(x.norm());
}

double BasisFunction::apply_operator(const Jet& jet) const {
  if (jet.table().order() < kappa_) throw InvalidArgument("jet order below the order of T");
  if (kind_ == BasisKind::TruncatedPower) return jet.derivative(MultiIndex{kappa_, 0, 0}) / (gamma_ * c_);
  // Delta^m = sum_{|beta| = m} m!/beta! D^(2 beta).
  const int m = kappa_ / 2;
  const auto& half = MultiIndexTable::get(dim_, m);
  double sum = 0.0;
  const double mfact = std::tgamma(m + 1.0);
  for (std::size_t i = half.degree_begin(m); i < half.degree_begin(m + 1); ++i) {
    const MultiIndex& beta = half[i];
    double bfact = 1.0;
    MultiIndex twice{0, 0, 0};
    for (int k = 0; k < dim_; ++k) {
      bfact *= std::tgamma(beta[static_cast<std::size_t>(k)] + 1.0);
      twice[static_cast<std::size_t>(k)] = 2 * beta[static_cast<std::size_t>(k)];
    }
    sum += mfact / bfact * jet.derivative(twice);
  }
  return sum / (gamma_ * c_);
}

double eval_basis(const BasisFunction& phi, const Point& x) { return phi(x); }

double apply_T(const BasisFunction& phi, const AnalyticTestFunction& f, const Point& t) {
  if (f.dim() != phi.dim()) throw InvalidArgument("target and basis dimensions differ");
  if (!f.support().contains(t)) return 0.0;
  if (f.smoothness() < phi.kappa()) {
    if (f.singularity() && distance(*f.singularity(), t) == 0.0)
      throw InvalidArgument("Tf requested at the singular point of '" + f.name() + "'");
  }
  return phi.apply_operator(f.jet(t, phi.kappa()));
}

double representation_residual(const BasisFunction& phi, const AnalyticTestFunction& f, const Point& x,
                               const QuadratureSpec& quad) {
  if (f.smoothness() < phi.kappa())
    throw InvalidArgument("representation requires a target in C^kappa; '" + f.name() + "' is not");
  // Cut the support at x so the kernel singularity sits on panel corners.
  const Box& b = f.support();
  const int d = b.dim();
  double sum = 0.0, comp = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    Box part = b;
    bool empty = false;
    for (int a = 0; a < d; ++a) {
      const double cut = std::clamp(x[a], b.lo[a], b.hi[a]);
      if (corner >> a & 1) part.lo[a] = cut;
      else part.hi[a] = cut;
      empty = empty || !(part.hi[a] > part.lo[a]);
    }
    if (empty) continue;
    for (const auto& n : composite_rule(part, quad, x)) {
      const double term = n.weight * apply_T(phi, f, n.t) * phi(x - n.t);
      const double y = term - comp;
      const double s = sum + y;
      comp = (s - sum) - y;
      sum = s;
    }
  }
  return std::abs(f(x) - sum);
}

RepresentationCheck verify_representation(const BasisFunction& phi, const AnalyticTestFunction& f, const Point& x,
                                          const QuadratureSpec& quad, int levels, double floor) {
  if (levels < 2) throw InvalidArgument("representation ladder needs at least two levels");
  RepresentationCheck out;
  QuadratureSpec q = quad;
  for (int l = 0; l < levels; ++l) {
    out.panels.push_back(q.panel);
    out.residuals.push_back(representation_residual(phi, f, x, q));
    q.panel *= 0.5;
  }
  out.converged = true;
  for (std::size_t i = 1; i < out.residuals.size(); ++i) {
    if (out.residuals[i - 1] <= floor) break;
    if (!(out.residuals[i] < out.residuals[i - 1])) {
      out.converged = false;
      break;
    }
  }
  if (!out.converged) {
    std::ostringstream os;
    os << "representation residual did not decrease under panel refinement at x = " << x.to_string();
    throw ConvergenceFailure(os.str());
  }
  return out;
}

}  // namespace scatshift
