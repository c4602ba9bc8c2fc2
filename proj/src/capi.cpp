#include "scatshift/scatshift.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "scatshift/config.hpp"
#include "scatshift/error.hpp"
#include "scatshift/experiments.hpp"
#include "scatshift/quasilinear.hpp"
#include "scatshift/registry.hpp"

struct ss_basis {
  scatshift::BasisFunction phi;
};
struct ss_centers {
  scatshift::CenterSet cs;
};
struct ss_approximant {
  scatshift::ScatteredApproximant a;
};

namespace {

thread_local std::string g_last_error;

ss_status fail(ss_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

ss_status from_kind(scatshift::ErrorKind k) {
  switch (k) {
    case scatshift::ErrorKind::InvalidArgument: return SS_ERR_INVALID_ARGUMENT;
    case scatshift::ErrorKind::Unisolvence: return SS_ERR_UNISOLVENCE;
    case scatshift::ErrorKind::Convergence: return SS_ERR_CONVERGENCE;
    case scatshift::ErrorKind::Io: return SS_ERR_IO;
    case scatshift::ErrorKind::Certificate: return SS_ERR_CERTIFICATE;
  }
  return SS_ERR_INTERNAL;
}

template <class F>
ss_status guard(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const scatshift::Error& e) {
    return fail(from_kind(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SS_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

scatshift::Point point(int dim, const double* x) {
  scatshift::Point p(dim);
  for (int i = 0; i < dim; ++i) p[i] = x[i];
  return p;
}

#define SS_REQUIRE(cond, msg) \
  if (!(cond)) return fail(SS_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* ss_last_error(void) { return g_last_error.c_str(); }
const char* ss_version(void) { return "1.0.0"; }
void ss_string_free(char* s) { std::free(s); }

ss_status ss_run(const char* command, const char* config_json, const char* mode, char** report) {
  return guard([&]() -> ss_status {
    SS_REQUIRE(command && config_json && report, "ss_run: null argument");
    *report = nullptr;
    const auto cfg = scatshift::ExperimentConfig::from_json(config_json);
    const auto res = scatshift::run_command(command, cfg, mode ? mode : "");
    *report = dup(res.report);
    if (!res.passed) return fail(SS_ERR_CERTIFICATE, "a certificate or invariant check failed (see report)");
    return SS_OK;
  });
}

ss_status ss_config_override(const char* config_json, const char* assignment, char** out) {
  return guard([&]() -> ss_status {
    SS_REQUIRE(config_json && assignment && out, "ss_config_override: null argument");
    *out = dup(scatshift::apply_override(config_json, assignment));
    return SS_OK;
  });
}

ss_status ss_config_resolve(const char* config_json, const char* command, char** out) {
  return guard([&]() -> ss_status {
    SS_REQUIRE(config_json && command && out, "ss_config_resolve: null argument");
    const auto cfg = scatshift::ExperimentConfig::from_json(config_json);
    cfg.validate(command);
    *out = dup(cfg.to_json());
    return SS_OK;
  });
}

ss_status ss_basis_create(const char* kind, int dim, int order, ss_basis** out) {
  return guard([&]() -> ss_status {
    SS_REQUIRE(kind && out, "ss_basis_create: null argument");
    const std::string k = kind;
    if (k == "surface_spline") *out = new ss_basis{scatshift::BasisFunction::surface_spline(dim, order)};
    else if (k == "truncated_power") {
      SS_REQUIRE(dim == 1, "truncated powers are univariate");
      *out = new ss_basis{scatshift::BasisFunction::truncated_power(order)};
    } else
      return fail(SS_ERR_INVALID_ARGUMENT, "unknown basis kind '" + k + "'");
    return SS_OK;
  });
}

ss_status ss_basis_eval(const ss_basis* phi, const double* x, double* value) {
  return guard([&]() -> ss_status {
    SS_REQUIRE(phi && x && value, "ss_basis_eval: null argument");
    *value = phi->phi(point(phi->phi.dim(), x));
    return SS_OK;
  });
}

int ss_basis_kappa(const ss_basis* phi) { return phi ? phi->phi.kappa() : 0; }
void ss_basis_free(ss_basis* phi) { delete phi; }

ss_status ss_centers_parse_csv(const char* text, ss_centers** out) {
  return guard([&]() -> ss_status {
    SS_REQUIRE(text && out, "ss_centers_parse_csv: null argument");
    *out = new ss_centers{scatshift::parse_centers_csv(text)};
    return SS_OK;
  });
}

ss_status ss_centers_uniform(int dim, const double* lo, const double* hi, double spacing, ss_centers** out) {
  return guard([&]() -> ss_status {
    SS_REQUIRE(lo && hi && out, "ss_centers_uniform: null argument");
    SS_REQUIRE(dim >= 1 && dim <= scatshift::kMaxDim, "dimension must be 1..3");
    *out = new ss_centers{scatshift::uniform_centers(scatshift::Box{point(dim, lo), point(dim, hi)}, spacing)};
    return SS_OK;
  });
}

size_t ss_centers_size(const ss_centers* cs) { return cs ? cs->cs.size() : 0; }
int ss_centers_dim(const ss_centers* cs) { return cs ? cs->cs.dim() : 0; }
void ss_centers_free(ss_centers* cs) { delete cs; }

ss_status ss_target_eval(const char* target, int dim, const double* x, double* value) {
  return guard([&]() -> ss_status {
    SS_REQUIRE(target && x && value, "ss_target_eval: null argument");
    *value = scatshift::make_target(target, dim)(point(dim, x));
    return SS_OK;
  });
}

ss_status ss_approximant_assemble(const ss_basis* phi, const ss_centers* cs, const char* target, double nu,
                                  double panel, int order, ss_approximant** out) {
  return guard([&]() -> ss_status {
    SS_REQUIRE(phi && cs && target && out, "ss_approximant_assemble: null argument");
    SS_REQUIRE(cs->cs.dim() == phi->phi.dim(), "center and basis dimensions differ");
    const auto f = scatshift::make_target(target, phi->phi.dim());
    const auto rc = scatshift::ReproductionConfig::for_basis(phi->phi, nu);
    *out = new ss_approximant{scatshift::assemble(f, cs->cs, phi->phi, rc, scatshift::QuadratureSpec{panel, order, 0})};
    return SS_OK;
  });
}

ss_status ss_approximant_eval(const ss_approximant* a, const double* xs, size_t count, double* values) {
  return guard([&]() -> ss_status {
    SS_REQUIRE(a && (count == 0 || (xs && values)), "ss_approximant_eval: null argument");
    const int d = a->a.basis().dim();
    std::vector<scatshift::Point> pts;
    pts.reserve(count);
    for (size_t i = 0; i < count; ++i) pts.push_back(point(d, xs + i * static_cast<size_t>(d)));
    const auto v = a->a.evaluate(pts);
    std::copy(v.begin(), v.end(), values);
    return SS_OK;
  });
}

size_t ss_approximant_size(const ss_approximant* a) { return a ? a->a.size() : 0; }

ss_status ss_approximant_to_json(const ss_approximant* a, char** out) {
  return guard([&]() -> ss_status {
    SS_REQUIRE(a && out, "ss_approximant_to_json: null argument");
    *out = dup(a->a.to_json());
    return SS_OK;
  });
}

void ss_approximant_free(ss_approximant* a) { delete a; }

}  // extern "C"
