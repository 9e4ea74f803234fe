#pragma once

#include "cablefsi/driver/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cablefsi::driver {

struct AuditResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured error
  double tolerance = 0.0;
};

/// Conservation and property checks on the state a config produces at t = 0:
/// dual closure, surface closure, transfer virtual work and load balance for
/// `trials` random configurations, rigid-motion reproduction, free-stream
/// residual, and the mass-ledger identity over a few fluid steps.
std::vector<AuditResult> run_audit(const RunConfig& config, std::uint64_t seed, int trials = 100);

}  // namespace cablefsi::driver
