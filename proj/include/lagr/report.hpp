#pragma once

#include <string>
#include <vector>

#include "lagr/experiment.hpp"
#include "lagr/oracle.hpp"

namespace lagr {

// Writes returns.csv, queries.csv, ratio.csv and manifest.json under
// out_dir. Files are written to <name>.partial and renamed on success, so a
// failed write never leaves a clean-looking partial CSV behind.
void write_bundle(const ExperimentOutcome& outcome);

// Accuracy benchmark rows as CSV.
void write_accuracy_csv(const std::string& path,
                        const std::vector<AccuracyRow>& rows);

// Converts a bundle into per-figure series files (learning curves with
// stderr bands, query-count bars) under series_dir.
void write_report_series(const std::string& bundle_dir,
                         const std::string& series_dir);

std::string format_double(double v);

}  // namespace lagr
