#include "lowreg/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "lowreg/types.hpp"

namespace lowreg {

namespace {

const char* kind_name(CaseResult::Kind k) {
  switch (k) {
    case CaseResult::Kind::Equals: return "equals";
    case CaseResult::Kind::AtMost: return "at-most";
    case CaseResult::Kind::AtLeast: return "at-least";
  }
  return "equals";
}

CaseResult::Kind kind_from_name(const std::string& s) {
  if (s == "at-most") return CaseResult::Kind::AtMost;
  if (s == "at-least") return CaseResult::Kind::AtLeast;
  return CaseResult::Kind::Equals;
}

std::string fmt(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double r = 0;
    std::sscanf(buf, "%lf", &r);
    if (r == v) return buf;
  }
  return buf;
}

}  // namespace

nlohmann::json report_to_json(const VerificationReport& rep) {
  bool timings = rep.config.is_object() && rep.config.value("timings", false);
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& c : rep.cases) {
    cases.push_back(nlohmann::json{{"suite", c.suite},
                                   {"name", c.name},
                                   {"observed", c.observed},
                                   {"expected", c.expected},
                                   {"tolerance", c.tolerance},
                                   {"kind", kind_name(c.kind)},
                                   {"pass", c.pass},
                                   {"millis", timings ? c.millis : 0.0}});
  }
  return nlohmann::json{{"suite", rep.suite}, {"config", rep.config}, {"cases", cases}};
}

VerificationReport report_from_json(const nlohmann::json& j) {
  VerificationReport rep;
  rep.suite = j.at("suite").get<std::string>();
  rep.config = j.value("config", nlohmann::json::object());
  for (const auto& c : j.at("cases")) {
    CaseResult cr;
    cr.suite = c.value("suite", rep.suite);
    cr.name = c.at("name").get<std::string>();
    cr.observed = c.at("observed").get<double>();
    cr.expected = c.at("expected").get<double>();
    cr.tolerance = c.at("tolerance").get<double>();
    cr.kind = kind_from_name(c.value("kind", "equals"));
    cr.pass = c.at("pass").get<bool>();
    cr.millis = c.value("millis", 0.0);
    rep.cases.push_back(std::move(cr));
  }
  return rep;
}

void emit_report(const VerificationReport& rep, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << report_to_json(rep).dump(2) << "\n";
    return;
  }
  if (format == "csv") {
    bool timings = rep.config.is_object() && rep.config.value("timings", false);
    out << "suite,case,observed,expected,tolerance,pass,millis\n";
    for (const auto& c : rep.cases) {
      out << c.suite << ',' << c.name << ',' << fmt(c.observed) << ',' << fmt(c.expected) << ','
          << fmt(c.tolerance) << ',' << (c.pass ? "true" : "false") << ','
          << fmt(timings ? c.millis : 0.0) << "\n";
    }
    return;
  }
  throw ParamError("unknown report format '" + format + "' (expected json or csv)");
}

void emit_report_file(const VerificationReport& rep, const std::string& format,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  emit_report(rep, format, out);
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
}

void emit_trace_csv(const std::vector<std::array<double, 3>>& rows, std::ostream& out) {
  out << "depth,chordCount,chordSum\n";
  for (const auto& r : rows)
    out << static_cast<long long>(r[0]) << ',' << static_cast<long long>(r[1]) << ',' << fmt(r[2])
        << "\n";
}

}  // namespace lowreg
