#include "scatshift/reproduction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"
#include "scatshift/error.hpp"

namespace scatshift {

std::size_t poly_dim(int dim, int n) {
  if (n <= 0) return 0;
  // C(n - 1 + d, d)
  std::size_t r = 1;
  for (int i = 1; i <= dim; ++i) r = r * static_cast<std::size_t>(n - 1 + i) / static_cast<std::size_t>(i);
  return r;
}

ReproductionConfig ReproductionConfig::for_basis(const BasisFunction& phi, double nu, int extra_points) {
  if (!(nu > phi.dim())) throw InvalidArgument("decay order nu must exceed the dimension");
  ReproductionConfig cfg;
  cfg.nu = nu;
  cfg.degree = phi.kappa() - phi.dim() + static_cast<int>(std::ceil(nu - 1e-12));
  cfg.extra_points = extra_points;
  return cfg;
}

std::size_t ReproductionConfig::poly_dim(int dim) const { return scatshift::poly_dim(dim, degree); }

double ReproductionConfig::norm_bound(int dim) const {
  return c_max > 0.0 ? c_max : 10.0 * static_cast<double>(poly_dim(dim));
}

std::size_t ReproductionConfig::max_points(int dim) const {
  const std::size_t p = poly_dim(dim);
  const std::size_t cap = enlargement_cap > 0 ? static_cast<std::size_t>(enlargement_cap) : 3 * p;
  return p + static_cast<std::size_t>(std::max(extra_points, 0)) + cap;
}

void ReproductionConfig::validate(int dim) const {
  if (degree < 1) throw InvalidArgument("reproduction degree bound n must be >= 1");
  if (extra_points < 0) throw InvalidArgument("extra_points must be non-negative");
  if (c_max < 0.0 || !std::isfinite(c_max)) throw InvalidArgument("c_max must be non-negative and finite");
  if (enlargement_cap < 0) throw InvalidArgument("enlargement_cap must be non-negative");
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("dimension out of range");
}

namespace {

double monomial(const MultiIndex& a, const Point& z) {
  double v = 1.0;
  for (int i = 0; i < z.dim(); ++i)
    for (int k = 0; k < a[static_cast<std::size_t>(i)]; ++k) v *= z[i];
  return v;
}

struct Attempt {
  bool full_rank = false;
  double residual = 0.0;
  Eigen::VectorXd coeffs;
};

Attempt least_norm(const std::vector<Point>& z, const MultiIndexTable& mons, double rank_tol) {
  const auto p = static_cast<Eigen::Index>(mons.size());
  const auto k = static_cast<Eigen::Index>(z.size());
  // Vt(j, alpha) = z_j^alpha; reproduction is Vt^T A = e_0.
  Eigen::MatrixXd vt(k, p);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index a = 0; a < p; ++a) vt(j, a) = monomial(mons[static_cast<std::size_t>(a)], z[static_cast<std::size_t>(j)]);
  Attempt out;
  if (k < p) return out;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vt);
  qr.setThreshold(rank_tol);
  if (qr.rank() < p) return out;
  // Vt P = Q R, so P R^T Q^T A = e_0 and the minimum-norm A is Q [R^-T P^T e_0; 0].
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  rhs(0) = 1.0;
  Eigen::VectorXd prhs = qr.colsPermutation().transpose() * rhs;
  const auto r = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  Eigen::VectorXd y = r.transpose().solve(prhs);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(k);
  full.head(p) = y;
  out.coeffs = qr.householderQ() * full;
  Eigen::VectorXd res = vt.transpose() * out.coeffs - rhs;
  out.residual = res.cwiseAbs().maxCoeff();
  out.full_rank = true;
  return out;
}

}  // namespace

double ReproducingFunctional::reproduction_residual() const {
  const auto& mons = MultiIndexTable::get(anchor.dim(), std::max(degree - 1, 0));
  const double scale = radius > 0.0 ? radius : 1.0;
  double worst = 0.0;
  for (std::size_t a = 0; a < mons.size(); ++a) {
    double s = 0.0;
    for (const auto& t : terms) {
      Point z = t.center - anchor;
      z *= 1.0 / scale;
      s += t.coeff * monomial(mons[a], z);
    }
    worst = std::max(worst, std::abs(s - (a == 0 ? 1.0 : 0.0)));
  }
  return worst;
}

ReproducingFunctional build_functional(const CenterSet& centers, const Point& t, const ReproductionConfig& cfg) {
  const int d = centers.dim();
  cfg.validate(d);
  if (t.dim() != d) throw InvalidArgument("anchor dimension differs from the center set");
  if (!t.finite()) throw InvalidArgument("anchor is not finite");
  const auto& mons = MultiIndexTable::get(d, cfg.degree - 1);
  const std::size_t p = mons.size();
  const std::size_t first = p + static_cast<std::size_t>(cfg.extra_points);
  const std::size_t last = std::min(cfg.max_points(d), centers.size());
  const double bound = cfg.norm_bound(d);
  if (first > centers.size())
    throw UnisolvenceFailure("center set has " + std::to_string(centers.size()) + " points, reproduction of degree < " +
                             std::to_string(cfg.degree) + " needs at least " + std::to_string(first));
  const auto nb_all = centers.k_nearest(t, last);
  bool any_rank = false;
  for (std::size_t k = first; k <= last; ++k) {
    const double rho = nb_all[k - 1].distance;
    const double scale = rho > 0.0 ? rho : 1.0;
    std::vector<Point> z;
    z.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      Point q = centers[nb_all[j].index] - t;
      q *= 1.0 / scale;
      z.push_back(q);
    }
    const Attempt att = least_norm(z, mons, cfg.rank_tol);
    if (!att.full_rank || att.residual > 1e-10) continue;
    any_rank = true;
    const double n1 = att.coeffs.cwiseAbs().sum();
    if (n1 > bound) continue;
    ReproducingFunctional f;
    f.anchor = t;
    f.degree = cfg.degree;
    f.norm1 = n1;
    f.radius = rho;
    f.enlargements = static_cast<int>(k - first);
    f.terms.reserve(k);
    for (std::size_t j = 0; j < k; ++j)
      f.terms.push_back({nb_all[j].index, centers[nb_all[j].index], att.coeffs(static_cast<Eigen::Index>(j))});
    return f;
  }
  std::ostringstream os;
  os << "no admissible reproduction of degree < " << cfg.degree << " at " << t.to_string() << " using up to " << last
     << " nearest centers (" << (any_rank ? "norm bound " + std::to_string(bound) + " exceeded" : "rank deficient") << ")";
  throw UnisolvenceFailure(os.str());
}

double DividedDifferenceScheme::bspline(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double u = x - knots[i];
    if (u > 0.0) s += weights[i] * std::pow(u, kappa - 1);
  }
  return s;
}

ReproducingFunctional DividedDifferenceScheme::functional() const {
  ReproducingFunctional f;
  f.anchor = anchor;
  f.degree = kappa;
  f.radius = radius;
  for (std::size_t j = 1; j < knots.size(); ++j) {
    const double c = -weights[j] / weights[0];
    f.terms.push_back({indices[j - 1], Point{knots[j]}, c});
    f.norm1 += std::abs(c);
  }
  return f;
}

DividedDifferenceScheme divided_difference_scheme(const CenterSet& centers, const Point& t, int kappa) {
  if (centers.dim() != 1) throw InvalidArgument("divided-difference scheme is univariate");
  if (kappa < 1) throw InvalidArgument("kappa must be >= 1");
  const std::size_t want = static_cast<std::size_t>(kappa);
  const std::size_t pool = std::min(centers.size(), want + 1);
  auto nb = centers.k_nearest(t, pool);
  std::erase_if(nb, [&](const Neighbor& n) { return centers[n.index][0] == t[0]; });
  if (nb.size() < want) throw UnisolvenceFailure("divided-difference scheme needs " + std::to_string(kappa) + " centers distinct from t");
  nb.resize(want);
  DividedDifferenceScheme s;
  s.anchor = t;
  s.kappa = kappa;
  s.knots.push_back(t[0]);
  for (const auto& n : nb) {
    s.knots.push_back(centers[n.index][0]);
    s.indices.push_back(n.index);
    s.radius = std::max(s.radius, n.distance);
  }
  s.weights.resize(s.knots.size());
  for (std::size_t i = 0; i < s.knots.size(); ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < s.knots.size(); ++j)
      if (j != i) prod *= s.knots[i] - s.knots[j];
    s.weights[i] = 1.0 / prod;
  }
  return s;
}

double error_kernel_eval(const ReproducingFunctional& lambda, const BasisFunction& phi, const Point& x) {
  double s = phi(x - lambda.anchor);
  for (const auto& t : lambda.terms) s -= t.coeff * phi(x - t.center);
  return s;
}

namespace {

Point random_direction(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Point u(d);
  double n = 0.0;
  while (n < 1e-12) {
    for (int i = 0; i < d; ++i) u[i] = g(rng);
    n = u.norm();
  }
  u *= 1.0 / n;
  return u;
}

struct Sweep {
  double c = 0.0;
  Point t, x;
  std::size_t samples = 0;
};

Sweep a4_sweep(const CenterSet& centers, const BasisFunction& phi, const ReproductionConfig& cfg, const A4Sampling& s,
               std::size_t anchors, std::size_t radii, std::size_t directions, SchemeKind scheme) {
  const int d = centers.dim();
  std::mt19937_64 rng(s.seed);
  Sweep out;
  const double kd = phi.kappa() - d;
  for (std::size_t a = 0; a < anchors; ++a) {
    Point t(d);
    for (int i = 0; i < d; ++i) t[i] = std::uniform_real_distribution<double>(s.anchor_box.lo[i], s.anchor_box.hi[i])(rng);
    const ReproducingFunctional lam = scheme == SchemeKind::DividedDifference
                                          ? divided_difference_scheme(centers, t, phi.kappa()).functional()
                                          : build_functional(centers, t, cfg);
    const double h = lam.radius;
    const std::size_t dirs = d == 1 ? 2 : directions;
    for (std::size_t k = 0; k < dirs; ++k) {
      Point u = d == 1 ? Point{k == 0 ? 1.0 : -1.0} : random_direction(d, rng);
      for (std::size_t r = 0; r <= radii; ++r) {
        // r = 0 is x = t; then log-spaced ratios from 1e-2 to max_ratio.
        const double ratio = r == 0 ? 0.0 : 1e-2 * std::pow(s.max_ratio / 1e-2, static_cast<double>(r - 1) / std::max<std::size_t>(radii - 1, 1));
        const Point x = t + (ratio * h) * u;
        const double e = std::abs(error_kernel_eval(lam, phi, x));
        const double env = std::pow(h, kd) * std::pow(1.0 + ratio, -cfg.nu);
        const double c = e / env;
        ++out.samples;
        if (c > out.c) {
          out.c = c;
          out.t = t;
          out.x = x;
        }
      }
    }
  }
  return out;
}

}  // namespace

A4Certificate a4_certificate(const CenterSet& centers, const BasisFunction& phi, const ReproductionConfig& cfg,
                             const A4Sampling& sampling, SchemeKind scheme) {
  if (centers.dim() != phi.dim()) throw InvalidArgument("center set and basis dimensions differ");
  if (sampling.anchor_box.dim() != centers.dim()) throw InvalidArgument("anchor box dimension differs from the center set");
  if (sampling.anchors == 0 || sampling.radii < 2) throw InvalidArgument("decay certificate sampling needs anchors and at least two radii");
  A4Certificate cert;
  const Sweep coarse = a4_sweep(centers, phi, cfg, sampling, sampling.anchors, sampling.radii, sampling.directions, scheme);
  const Sweep fine = a4_sweep(centers, phi, cfg, sampling, 2 * sampling.anchors, 2 * sampling.radii, 2 * sampling.directions, scheme);
  cert.c_levels = {coarse.c, fine.c};
  cert.c_meas = std::max(coarse.c, fine.c);
  cert.stable = std::abs(fine.c - coarse.c) <= sampling.stability * cert.c_meas;
  const Sweep& w = fine.c >= coarse.c ? fine : coarse;
  cert.worst_t = w.t;
  cert.worst_x = w.x;
  cert.samples = coarse.samples + fine.samples;
  return cert;
}

std::string functional_to_json(const ReproducingFunctional& lambda) {
  nlohmann::ordered_json j;
  j["anchor"] = std::vector<double>(lambda.anchor.data(), lambda.anchor.data() + lambda.anchor.dim());
  j["degree"] = lambda.degree;
  j["radius"] = lambda.radius;
  j["norm1"] = lambda.norm1;
  j["enlargements"] = lambda.enlargements;
  auto& terms = j["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : lambda.terms)
    terms.push_back({{"index", t.index},
                     {"center", std::vector<double>(t.center.data(), t.center.data() + t.center.dim())},
                     {"coeff", t.coeff}});
  return j.dump(2);
}

}  // namespace scatshift
