#pragma once

// Text rendering of an ExperimentReport. Layout:
//
//   # nlwave report / format_version / config_hash / seed / scenario
//   [summary]   one PASS/FAIL line per check, fits, warnings, status
//   [config]    the canonical config echo
//   [table NAME] csv, one per table; [table checks] is always present
//
// Nothing time- or host-dependent is written, so identical runs produce
// identical bytes.

#include <string>

#include "nlwave/config.hpp"
#include "nlwave/experiments.hpp"
#include "nlwave/io.hpp"

namespace nlwave {

inline std::string provenance_header(const std::string& title, const std::string& config_hash, std::uint64_t seed) {
  std::string out;
  out += "# nlwave " + title + "\n";
  out += "# format_version: " + std::to_string(kFormatVersion) + "\n";
  out += "# config_hash: " + config_hash + "\n";
  out += "# seed: " + std::to_string(seed) + "\n";
  return out;
}

inline std::string format_check_line(const Check& c) {
  return std::string(c.passed ? "PASS " : "FAIL ") + c.name + " = " + format_real(c.value) + " in [" +
         format_real(c.lo) + ", " + format_real(c.hi) + "]  (" + c.invariant + ")";
}

inline std::string format_report(const ExperimentReport& rep, const Config& cfg,
                                 const std::string& failure_reason = {}) {
  std::string out = provenance_header("report", cfg.hash(), rep.seed);
  out += "# scenario: " + to_string(rep.scenario) + "\n";

  out += "\n[summary]\n";
  out += "cases = " + std::to_string(rep.cases) + "\n";
  for (const auto& c : rep.checks) out += format_check_line(c) + "\n";
  for (const auto& f : rep.fits)
    out += "fit " + f.name + ": slope = " + format_real(f.slope) + " +- " + format_real(f.stderr_slope) +
           ", intercept = " + format_real(f.intercept) + ", points = " + std::to_string(f.points) + "\n";
  for (const auto& w : rep.warnings) out += "warning: " + w + "\n";
  if (!failure_reason.empty()) out += "failure: " + failure_reason + "\n";
  std::size_t passed = 0;
  for (const auto& c : rep.checks) passed += c.passed;
  const bool ok = failure_reason.empty() && rep.all_passed();
  out += "status = " + std::string(ok ? "PASS" : "FAIL") + " (" + std::to_string(passed) + "/" +
         std::to_string(rep.checks.size()) + " checks)\n";

  out += "\n[config]\n";
  out += cfg.echo();

  out += "\n[table checks]\n";
  out += "name,value,lo,hi,passed\n";
  for (const auto& c : rep.checks)
    out += c.name + "," + format_real(c.value) + "," + format_real(c.lo) + "," + format_real(c.hi) + "," +
           (c.passed ? "1" : "0") + "\n";
  if (!rep.fits.empty()) {
    out += "\n[table fits]\n";
    out += "name,slope,stderr_slope,intercept,points\n";
    for (const auto& f : rep.fits)
      out += f.name + "," + format_real(f.slope) + "," + format_real(f.stderr_slope) + "," + format_real(f.intercept) +
             "," + std::to_string(f.points) + "\n";
  }
  for (const auto& t : rep.tables) {
    out += "\n[table " + t.name + "]\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_real(row[i]);
      out += "\n";
    }
  }
  return out;
}

}  // namespace nlwave
