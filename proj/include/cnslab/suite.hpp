#pragma once

#include <string>
#include <vector>

#include "cnslab/config.hpp"
#include "cnslab/experiments.hpp"
#include "cnslab/probes.hpp"

namespace cnslab {

// Acceptance criterion ids, 1..11.
std::vector<int> criterion_ids();
std::string criterion_title(int id);

// Runs the requested criteria; 7 and 8 share one delta sweep. Each report
// carries the config echo and its checks cite their criterion id.
std::vector<ExperimentReport> run_criteria(const std::vector<int>& ids, const RunConfig& cfg);

// Selector names accepted by `probe` (probe.name); "all" runs every criterion.
std::vector<int> criteria_for_probe(const std::string& name);

// <dir>/<name>_checks.csv and <dir>/<name>_measured.csv.
void write_report(const std::string& dir, const ExperimentReport& rep, const std::string& echo);

struct Summary {
  std::vector<CriterionCheck> checks;  // merged, in file order
  std::vector<int> missing;           // ids with no check at all
  bool pass = false;
  int exit_code = 0;  // 0 iff pass; otherwise the first failing (or missing) id
};
Summary summarize(const std::string& dir);
std::string render_summary(const Summary& s);

// Command bodies shared by the CLI and the determinism check.
void write_decay_fit(const RunConfig& cfg, const std::string& dir);
void write_wave_fit(const RunConfig& cfg, const std::string& dir);
// Diagnostics CSV plus snapshot files every stepper.snapshot_stride steps.
Trajectory write_simulation(const RunConfig& cfg, const std::string& dir);
// Besov, X0 and, for snapshot pairs, tracked norms of a single snapshot.
std::string describe_snapshot_norms(const RunConfig& cfg, const std::string& path);

}  // namespace cnslab
