#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lowreg/report.hpp"

namespace lowreg {

struct SuiteConfig {
  std::uint64_t seed = 42;
  bool timings = false;  // real per-case wall times in emitted reports
};

const std::vector<std::string>& suite_names();

/// Runs one verification suite ("all" concatenates every suite in order).
/// Deterministic for a fixed config; cases appear in declaration order.
VerificationReport run_suite(const std::string& name, const SuiteConfig& cfg = {});

}  // namespace lowreg
