#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scatshift/config.hpp"

namespace scatshift {

struct CommandResult {
  bool passed = true;  ///< false when a certificate or invariant check failed
  std::string report;  ///< JSON summary embedding the resolved config
  std::vector<std::pair<std::string, std::string>> artifacts;  ///< file name, content
};

/// Runs one of density, approximate, low-smooth, nterm, rates, verify.
/// `mode` selects the rates study (linear | nterm | lowsmooth); empty means linear.
/// Artifacts are returned, and also written when cfg.output is set.
CommandResult run_command(const std::string& command, const ExperimentConfig& cfg, const std::string& mode = "");

/// Writes each artifact and report.json into dir (created if missing).
void write_artifacts(const CommandResult& result, const std::string& dir);

}  // namespace scatshift
