#pragma once

// Artifact emission: one CSV per ledger table with a header comment
// (tool version, config hash, seed), a column schema sidecar, a gnuplot
// script, and the JSON summary plus the resolved config for the run.

#include <filesystem>
#include <string>
#include <vector>

#include "isac/montecarlo.hpp"

namespace isac {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_cell(const Cell& c);

/// "# isac-glrt <version> kind=<k> config_hash=<h> seed=<s> trials=<n> mode=<m> policy=<p>"
std::string artifact_header(const TrialLedger& ledger);

std::string csv_text(const Table& t, const TrialLedger& ledger);
std::string schema_text(const Table& t, const TrialLedger& ledger);
std::string gnuplot_text(const Table& t);
std::string summary_text(const TrialLedger& ledger);

/// Writes every artifact of the ledger into out_dir (created if missing)
/// and returns the paths in write order.
std::vector<std::filesystem::path> emit_plot_data(const TrialLedger& ledger,
                                                  const std::filesystem::path& out_dir);

}  // namespace isac
