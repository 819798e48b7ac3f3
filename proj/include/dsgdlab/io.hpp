#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dsgdlab/config.hpp"
#include "dsgdlab/runner.hpp"
#include "dsgdlab/validation.hpp"

namespace dsgdlab {

// Shortest exact decimal rendering (17 significant digits).
std::string format_double(double v);

// Write runs.csv, tails.csv, fits.json, report.txt (and trace.csv when a
// trace was recorded) into out_dir, each carrying the config hash. An I/O
// failure removes every file this call created and rethrows, so a partially
// written experiment never looks complete.
// Returns the paths written.
std::vector<std::string> write_outputs(const std::string& out_dir,
                                       const ExperimentConfig& cfg,
                                       const SweepResult& result);

// Lemma/property check reports as JSON (infinities become strings).
nlohmann::json check_report_json(const CheckReport& r);
nlohmann::json check_reports_json(const std::vector<CheckReport>& reports);

// Fixed-width console table of check reports; returns true when all passed.
bool print_check_table(const std::vector<CheckReport>& reports);

}  // namespace dsgdlab
