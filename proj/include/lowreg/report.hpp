#pragma once

#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace lowreg {

struct CaseResult {
  std::string suite;
  std::string name;
  double observed = 0;
  double expected = 0;
  double tolerance = 0;
  enum class Kind { Equals, AtMost, AtLeast } kind = Kind::Equals;
  bool pass = false;
  double millis = 0;

  static bool passes(double observed, double expected, double tolerance, Kind kind) {
    switch (kind) {
      case Kind::Equals: return std::abs(observed - expected) <= tolerance;
      case Kind::AtMost: return observed <= expected + tolerance;
      case Kind::AtLeast: return observed >= expected - tolerance;
    }
    return false;
  }
};

struct VerificationReport {
  std::string suite;
  nlohmann::json config;  // snapshot of the configuration that produced it
  std::vector<CaseResult> cases;

  bool all_pass() const {
    for (const auto& c : cases)
      if (!c.pass) return false;
    return true;
  }
};

/// format is "json" or "csv". CSV columns:
/// suite,case,observed,expected,tolerance,pass,millis
/// Timing columns are zero unless the report's config carries timings=true,
/// keeping emitted files byte-stable across runs with the same seed.
void emit_report(const VerificationReport& rep, const std::string& format, std::ostream& out);
void emit_report_file(const VerificationReport& rep, const std::string& format,
                      const std::string& path);

/// CSV trace emission for refinement traces (columns depth,chordCount,chordSum).
void emit_trace_csv(const std::vector<std::array<double, 3>>& rows, std::ostream& out);

nlohmann::json report_to_json(const VerificationReport& rep);
VerificationReport report_from_json(const nlohmann::json& j);

}  // namespace lowreg
