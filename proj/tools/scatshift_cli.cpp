// Command-line front end. Talks to the library only through scatshift.h.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scatshift/scatshift.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInvalid = 2;

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out;
  std::string mode;
  long long seed = -1;
  bool quiet = false;
};

int exit_code(ss_status s) {
  switch (s) {
    case SS_OK: return kExitOk;
    case SS_ERR_INVALID_ARGUMENT:
    case SS_ERR_IO: return kExitInvalid;
    default: return kExitFailed;
  }
}

// Owns a string returned by the library.
struct Owned {
  char* p = nullptr;
  ~Owned() { ss_string_free(p); }
};

bool override_config(std::string& json, const std::string& assignment) {
  Owned o;
  if (ss_config_override(json.c_str(), assignment.c_str(), &o.p) != SS_OK) {
    std::cerr << "error: " << ss_last_error() << '\n';
    return false;
  }
  json = o.p;
  return true;
}

int run(const std::string& command, const Options& opt) {
  std::string json = "{}";
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config '" << opt.config_path << "'\n";
      return kExitInvalid;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    json = ss.str();
  }
  for (const auto& s : opt.sets)
    if (!override_config(json, s)) return kExitInvalid;
  if (opt.seed >= 0) {
    const std::string v = std::to_string(opt.seed);
    if (!override_config(json, "centers.seed=" + v) || !override_config(json, "verify.seed=" + v)) return kExitInvalid;
  }
  std::string out = opt.out;
  if (out.empty())
    if (const char* env = std::getenv("SCATSHIFT_OUTPUT_DIR"); env && *env) out = env;
  if (!out.empty()) {
    // a JSON string literal keeps paths with '=' or digits intact
    std::string quoted = "\"";
    for (char c : out) {
      if (c == '"' || c == '\\') quoted += '\\';
      quoted += c;
    }
    quoted += '"';
    if (!override_config(json, "output=" + quoted)) return kExitInvalid;
  }

  Owned report;
  const ss_status st = ss_run(command.c_str(), json.c_str(), opt.mode.empty() ? nullptr : opt.mode.c_str(), &report.p);
  if (report.p && !opt.quiet) std::fputs(report.p, stdout);
  if (st != SS_OK) std::cerr << "error: " << command << ": " << ss_last_error() << '\n';
  return exit_code(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattered-shift approximation with surface splines: density certificates, quasi-interpolation, "
               "wavelet N-term allocation and rate studies."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ss_version()));
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"density", "local density h and majorant H on a lattice"},
      {"approximate", "assemble the quasi-interpolant and its weighted error certificates"},
      {"low-smooth", "wavelet split by density and approximation of the resolved part"},
      {"nterm", "N-term approximant for one budget"},
      {"rates", "rate study: --mode linear | nterm | lowsmooth"},
      {"verify", "decay certificate, Schur diagnostic, representation and wavelet checks"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("-s,--set", opt.sets, "override, e.g. --set reproduction.nu=3 (repeatable)");
    sub->add_option("-o,--out", opt.out, "output directory (env SCATSHIFT_OUTPUT_DIR when absent)");
    sub->add_option("--seed", opt.seed, "seed for random centers and sampling")->check(CLI::NonNegativeNumber);
    sub->add_flag("-q,--quiet", opt.quiet, "do not print the report");
    if (name == "rates") sub->add_option("-m,--mode", opt.mode, "linear, nterm or lowsmooth")
                             ->check(CLI::IsMember({"linear", "nterm", "lowsmooth"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }
  for (const auto& [name, help] : commands)
    if (app.got_subcommand(name)) return run(name, opt);
  return kExitInvalid;
}
