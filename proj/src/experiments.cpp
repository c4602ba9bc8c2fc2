#include "scatshift/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "scatshift/daubechies.hpp"
#include "scatshift/density.hpp"
#include "scatshift/error.hpp"
#include "scatshift/lowsmooth.hpp"
#include "scatshift/rates.hpp"

namespace scatshift {

using ojson = nlohmann::ordered_json;

namespace {

ojson real_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Setup {
  BasisFunction phi;
  ReproductionConfig rc;
  AnalyticTestFunction f;
};

Setup setup(const ExperimentConfig& cfg) {
  BasisFunction phi = cfg.basis.make();
  return Setup{phi, cfg.reproduction(phi), make_target(cfg.target, phi.dim())};
}

ojson certificate_json(const ErrorCertificate& c) {
  return {{"s", c.s},
          {"p", real_json(c.p)},
          {"weighted_error", c.weighted_error},
          {"reference", c.reference},
          {"constant", c.constant},
          {"sup_error", c.sup_error},
          {"grid_spacing", c.grid_spacing},
          {"grid_nodes", c.grid_nodes}};
}

std::string field_csv(const GridSpec& g, const std::vector<std::pair<std::string, const std::vector<double>*>>& cols) {
  std::ostringstream os;
  for (int i = 0; i < g.dim(); ++i) os << 'x' << i << ',';
  for (std::size_t c = 0; c < cols.size(); ++c) os << cols[c].first << (c + 1 < cols.size() ? "," : "\n");
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Point p = g.node(n);
    for (int i = 0; i < g.dim(); ++i) os << fmt(p[i]) << ',';
    for (std::size_t c = 0; c < cols.size(); ++c) os << fmt((*cols[c].second)[n]) << (c + 1 < cols.size() ? "," : "\n");
  }
  return os.str();
}

WaveletSystem wavelet_system(const ExperimentConfig& cfg, const BasisFunction& phi) {
  const int N = cfg.wavelets.vanishing_moments > 0 ? cfg.wavelets.vanishing_moments : vanishing_moments_for(phi.kappa());
  return WaveletSystem(phi.dim(), N, phi.kappa(), cfg.wavelets.resolution);
}

double default_q(const ExperimentConfig& cfg, int d) { return cfg.norm.q > 0.0 ? cfg.norm.q : 1.0 / (1.0 + cfg.norm.s / d); }

CommandResult run_density(const ExperimentConfig& cfg) {
  const Setup st = setup(cfg);
  const CenterSet cs = cfg.centers.make(st.f.support());
  const GridSpec g = cfg.density_grid(st.f.support());
  const DensityField h = build_density(cs, st.rc, g);
  const MajorantField H = MajorantField::build(h, cfg.majorant_exponent(), cfg.nu, st.phi.kappa());
  std::size_t below = 0;
  double hmax = 0.0, Hmin = INFINITY, Hmax = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (H.at_node(i) < h.at_node(i)) ++below;
    hmax = std::max(hmax, h.at_node(i));
    Hmin = std::min(Hmin, H.at_node(i));
    Hmax = std::max(Hmax, H.at_node(i));
  }
  CommandResult out;
  out.passed = below == 0;
  ojson r;
  r["centers"] = cs.size();
  r["grid_nodes"] = g.size();
  r["grid_spacing"] = g.spacing;
  r["h_min_floor"] = h.h_min();
  r["h"] = {{"min", h.min()}, {"max", hmax}};
  r["H"] = {{"min", Hmin}, {"max", Hmax}};
  r["r"] = H.r();
  r["tol_disc"] = H.tol_disc();
  r["nodes_with_H_below_h"] = below;
  out.report = r.dump();
  out.artifacts.emplace_back("density.csv", field_csv(g, {{"h", &h.values()}, {"H", &H.node_values()}}));
  return out;
}

CommandResult run_approximate(const ExperimentConfig& cfg) {
  const Setup st = setup(cfg);
  const CenterSet cs = cfg.centers.make(st.f.support());
  AssemblyStats stats;
  const ScatteredApproximant F = assemble(st.f, cs, st.phi, st.rc, cfg.quadrature, &stats);
  const GridSpec g = cfg.density_grid(st.f.support());
  const DensityField h = build_density(cs, st.rc, g);
  const MajorantField H = MajorantField::build(h, cfg.majorant_exponent(), cfg.nu, st.phi.kappa());
  const double k = st.phi.kappa();
  std::vector<ErrorCertificate> certs;
  certs.push_back(error_certificate(st.f, F, st.phi, H, k, cfg.norm.p, g));
  if (!std::isinf(cfg.norm.p)) certs.push_back(error_certificate(st.f, F, st.phi, H, k, INFINITY, g));
  certs.push_back(error_certificate(st.f, F, st.phi, H, 0.5 * k, cfg.norm.p, g));
  certs.push_back(error_certificate(st.f, F, st.phi, H, 0.75 * k, cfg.norm.p, g));
  CommandResult out;
  ojson r;
  r["centers"] = cs.size();
  r["active_centers"] = F.size();
  r["assembly"] = {{"nodes", stats.nodes},           {"active_nodes", stats.active_nodes},
                   {"max_enlargements", stats.max_enlargements}, {"max_norm1", stats.max_norm1},
                   {"min_radius", stats.min_radius}, {"max_radius", stats.max_radius}};
  auto& arr = r["certificates"] = ojson::array();
  std::ostringstream csv;
  csv << "s,p,weighted_error,reference,constant,sup_error\n";
  for (const auto& c : certs) {
    arr.push_back(certificate_json(c));
    csv << fmt(c.s) << ',' << (std::isinf(c.p) ? std::string("inf") : fmt(c.p)) << ',' << fmt(c.weighted_error) << ','
        << fmt(c.reference) << ',' << fmt(c.constant) << ',' << fmt(c.sup_error) << '\n';
    if (!std::isfinite(c.constant)) out.passed = false;
  }
  out.report = r.dump();
  out.artifacts.emplace_back("approximant.json", F.to_json());
  out.artifacts.emplace_back("errors.csv", csv.str());
  return out;
}

CommandResult run_low_smooth(const ExperimentConfig& cfg) {
  const Setup st = setup(cfg);
  const int d = st.phi.dim();
  const CenterSet cs = cfg.centers.make(st.f.support());
  const WaveletSystem sys = wavelet_system(cfg, st.phi);
  const WaveletExpansion exp = expand_target(st.f, cfg.nterm_config(), sys);
  const GridSpec g = cfg.density_grid(st.f.support());
  const DensityField h = build_density(cs, st.rc, g);
  const MajorantField H = MajorantField::build(h, cfg.majorant_exponent(), cfg.nu, st.phi.kappa());
  const LowSmoothResult res = approximate_low_smoothness(exp, sys, cs, st.phi, st.rc, h, cfg.norm.s);
  std::vector<double> err(g.size()), Hx(g.size());
  std::vector<Point> xs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) xs[i] = g.node(i);
  const std::vector<double> Fx = res.F.evaluate(xs);
  for (std::size_t i = 0; i < g.size(); ++i) {
    err[i] = st.f(xs[i]) - Fx[i];
    Hx[i] = H(xs[i]);
  }
  const double werr = weighted_norm(err, Hx, cfg.norm.s, cfg.norm.p, g.cell_volume());
  const int level = std::min(cfg.wavelets.fine_level, d == 1 ? 14 : 7);
  const GridSpec tg = GridSpec::cell_centred(st.f.support(), std::ldexp(1.0, -level));
  const double q = default_q(cfg, d);
  const TlNorm tl = tl_norm(exp, sys, cfg.norm.s, cfg.norm.p, q, tg);
  CommandResult out;
  ojson r;
  r["centers"] = cs.size();
  r["plus_terms"] = res.plus_terms;
  r["minus_terms"] = res.minus_terms;
  r["node_level"] = res.node_level;
  r["source_nodes"] = res.nodes;
  r["active_centers"] = res.F.size();
  r["t_constant"] = res.t_constant;
  r["weighted_error"] = werr;
  r["tl_norm"] = {{"s", cfg.norm.s}, {"p", real_json(cfg.norm.p)}, {"q", q}, {"seminorm", tl.seminorm}, {"norm", tl.norm},
                  {"grid_spacing", tg.spacing}};
  r["ratio_to_norm"] = tl.norm > 0.0 ? werr / tl.norm : 0.0;
  out.passed = std::isfinite(werr);
  out.report = r.dump();
  out.artifacts.emplace_back("approximant.json", res.F.to_json());
  return out;
}

CommandResult run_nterm(const ExperimentConfig& cfg) {
  const Setup st = setup(cfg);
  const WaveletSystem sys = wavelet_system(cfg, st.phi);
  const NTermConfig nc = cfg.nterm_config();
  const WaveletExpansion exp = expand_target(st.f, nc, sys);
  const NTermApproximant a = nterm_approximate(exp, cfg.nterm.budget, nc, sys, st.phi);
  const double e = lp_error(st.f, a.S, error_box(st.f, a.S), cfg.norm.p, cfg.quadrature);
  const auto N = static_cast<double>(cfg.nterm.budget);
  const bool cost_ok = a.allocation.total_cost <= N;
  const bool count_ok = a.distinct_centers <= static_cast<std::size_t>(cfg.nterm.budget) &&
                        a.allocation.total_n <= cfg.nterm.budget;
  CommandResult out;
  out.passed = cost_ok && count_ok;
  ojson r;
  r["budget"] = cfg.nterm.budget;
  r["error"] = e;
  r["wavelet_terms"] = exp.nonzero();
  r["vanishing_moments"] = sys.vanishing_moments();
  r["n0"] = a.allocation.n0;
  r["total_cost"] = a.allocation.total_cost;
  r["total_n"] = a.allocation.total_n;
  r["raw_centers"] = a.raw_centers;
  r["distinct_centers"] = a.distinct_centers;
  r["cost_within_budget"] = cost_ok;
  r["centers_within_budget"] = count_ok;
  out.report = r.dump();
  out.artifacts.emplace_back("nterm.json", a.to_json());
  return out;
}

CommandResult run_rates(const ExperimentConfig& cfg, const std::string& mode) {
  const Setup st = setup(cfg);
  RateReport rep;
  const std::string m = mode.empty() ? "linear" : mode;
  if (m == "linear") {
    rep = linear_study(st.f, st.phi, st.rc, cfg.ladder);
  } else if (m == "nterm" || m == "lowsmooth") {
    const WaveletSystem sys = wavelet_system(cfg, st.phi);
    std::vector<long long> budgets = cfg.nterm.budgets;
    if (budgets.empty()) budgets = {16, 32, 64, 128, 256};
    rep = m == "nterm" ? sigma_study(st.f, budgets, cfg.nterm_config(), sys, st.phi, cfg.quadrature)
                       : lowsmooth_budget_study(st.f, budgets, cfg.nterm_config(), sys, st.phi, cfg.quadrature);
  } else {
    throw InvalidArgument("rates --mode must be linear, nterm or lowsmooth, got '" + m + "'");
  }
  CommandResult out;
  bool finite = true;
  for (const auto& p : rep.points) finite = finite && std::isfinite(p.error);
  out.passed = finite;
  ojson r = ojson::parse(rep.to_json());
  out.report = r.dump();
  out.artifacts.emplace_back("rates.csv", rep.to_csv());
  return out;
}

double round_trip_error(const AnalyticTestFunction& f, const WaveletSystem& sys, int j0, int J) {
  const DyadicSamples s = sample_function([&](const Point& x) { return f(x); }, f.support(), J, sys);
  const WaveletExpansion e = decompose(s, sys, j0);
  const DyadicSamples back = reconstruct(e, sys);
  double worst = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) {
    const std::int64_t k = back.lo[0] + static_cast<std::int64_t>(i);
    const std::int64_t at = k - s.lo[0];
    const double ref = at >= 0 && at < s.count[0] ? s.values[static_cast<std::size_t>(at)] : 0.0;
    worst = std::max(worst, std::abs(back.values[i] - ref));
  }
  return worst;
}

CommandResult run_verify(const ExperimentConfig& cfg) {
  const Setup st = setup(cfg);
  const CenterSet cs = cfg.centers.make(st.f.support());
  CommandResult out;
  ojson r;

  A4Sampling smp;
  smp.anchor_box = cfg.centers.source == "csv" ? cs.bounding_box() : cfg.centers.box(st.f.support());
  smp.anchors = cfg.verify.anchors;
  smp.radii = cfg.verify.radii;
  smp.directions = cfg.verify.directions;
  smp.max_ratio = cfg.verify.max_ratio;
  smp.seed = *cfg.verify.seed;
  const SchemeKind kind = cfg.verify.scheme == "least_norm" ? SchemeKind::LeastNorm : SchemeKind::DividedDifference;
  const A4Certificate a4 = a4_certificate(cs, st.phi, st.rc, smp, kind);
  const bool a4_ok = a4.c_meas <= cfg.verify.c_bound;
  r["a4"] = {{"scheme", cfg.verify.scheme},
             {"nu", cfg.nu},
             {"C_meas", a4.c_meas},
             {"C_levels", a4.c_levels},
             {"C_bound", cfg.verify.c_bound},
             {"stable", a4.stable},
             {"samples", a4.samples},
             {"worst_t", a4.worst_t[0]},
             {"worst_x", a4.worst_x[0]},
             {"pass", a4_ok}};
  out.passed = a4_ok;

  if (cfg.verify.schur) {
    SchurLadderSpec spec;
    spec.fine = cfg.schur.fine;
    spec.coarse = cfg.schur.coarse;
    spec.coarse_count = cfg.schur.coarse_count;
    spec.extents = cfg.schur.extents;
    spec.kernel = cfg.schur.kernel == "actual" ? SchurKernel::Actual : SchurKernel::DecayBound;
    const double bound = majorant_exponent_bound(cfg.nu, 1, st.phi.kappa());
    auto ladder_json = [&](const SchurLadder& l) {
      ojson a = ojson::array();
      for (std::size_t i = 0; i < l.reports.size(); ++i)
        a.push_back({{"L", l.extents[i]}, {"row_sup", l.reports[i].row_sup}, {"col_sup", l.reports[i].col_sup}});
      return ojson{{"r", l.r}, {"pass", l.verdict.pass}, {"increment_ratio", l.verdict.growth},
                   {"reason", l.verdict.reason}, {"ladder", a}};
    };
    const SchurLadder def = schur_ladder(st.phi, st.rc, cfg.majorant_exponent(), st.phi.kappa(), spec);
    ojson s{{"kernel", cfg.schur.kernel}, {"threshold", schur_ratio_threshold(cfg.nu, 1)}, {"default", ladder_json(def)}};
    bool ok = def.verdict.pass;
    if (cfg.schur.probe_bound) {
      const SchurLadder at = schur_ladder(st.phi, st.rc, bound, st.phi.kappa(), spec);
      s["at_bound"] = ladder_json(at);
      ok = ok && !at.verdict.pass;
    }
    s["pass"] = ok;
    r["schur"] = s;
    out.passed = out.passed && ok;
  }

  ojson reps = ojson::array();
  bool rep_ok = true;
  for (double x : cfg.verify.representation_points) {
    const Point p{x};
    try {
      const RepresentationCheck rc = verify_representation(st.phi, st.f, p, cfg.quadrature, 4, 1e-10);
      reps.push_back({{"x", x}, {"residuals", rc.residuals}, {"converged", rc.converged}});
      rep_ok = rep_ok && rc.converged;
    } catch (const ConvergenceFailure& e) {
      reps.push_back({{"x", x}, {"converged", false}, {"reason", e.what()}});
      rep_ok = false;
    }
  }
  r["representation"] = {{"points", reps}, {"pass", rep_ok}};
  out.passed = out.passed && rep_ok;

  const WaveletSystem sys = wavelet_system(cfg, st.phi);
  const int J = std::min(cfg.wavelets.fine_level, 14);
  const double rt = round_trip_error(st.f, sys, cfg.wavelets.base_level, J);
  const double vm = highpass_moment_defect(sys.filter());
  const bool w_ok = rt <= 1e-8 && vm <= 1e-6;
  r["wavelets"] = {{"vanishing_moments", sys.vanishing_moments()},
                   {"reconstruction_error", rt},
                   {"moment_defect", vm},
                   {"pass", w_ok}};
  out.passed = out.passed && w_ok;
  out.report = r.dump();
  return out;
}

}  // namespace

CommandResult run_command(const std::string& command, const ExperimentConfig& cfg, const std::string& mode) {
  cfg.validate(command, mode);
  if (!mode.empty() && command != "rates") throw InvalidArgument("--mode applies to rates only");
  CommandResult res;
  if (command == "density") res = run_density(cfg);
  else if (command == "approximate") res = run_approximate(cfg);
  else if (command == "low-smooth") res = run_low_smooth(cfg);
  else if (command == "nterm") res = run_nterm(cfg);
  else if (command == "rates") res = run_rates(cfg, mode);
  else res = run_verify(cfg);

  ojson full;
  full["command"] = command;
  if (command == "rates") full["mode"] = mode.empty() ? "linear" : mode;
  full["passed"] = res.passed;
  full["results"] = ojson::parse(res.report);
  if (full["results"].contains("config")) full["results"].erase("config");
  auto& files = full["artifacts"] = ojson::array();
  for (const auto& a : res.artifacts) files.push_back(a.first);
  full["float_format"] = "shortest round-trip decimal in JSON, %.17g in CSV";
  full["config"] = ojson::parse(cfg.to_json());
  res.report = full.dump(2) + "\n";
  if (!cfg.output.empty()) write_artifacts(res, cfg.output);
  return res;
}

void write_artifacts(const CommandResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  auto put = [&](const std::string& name, const std::string& content) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw IoError("cannot write '" + path.string() + "'");
  };
  for (const auto& a : result.artifacts) put(a.first, a.second);
  put("report.json", result.report);
}

}  // namespace scatshift
