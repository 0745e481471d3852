#pragma once

#include <string>
#include <vector>

#include "nematic/config.hpp"

namespace nematic {

struct InvariantResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string note;
  bool gating = true;  // false: reported in the summary, not part of the exit code
};

struct RunOutcome {
  int exit_code = 0;
  RunResult result;
  std::vector<InvariantResult> invariants;
  NormReport norms;
  std::string summary_json;
};

/// Evaluates the invariant suite on a finished (or aborted) run.
std::vector<InvariantResult> evaluate_invariants(const Grid& grid, const RunResult& result, const MaterialLaws& laws,
                                                 double dissipation_k);

/// Runs the configuration and writes ledger.csv, snapshots, heatmaps and
/// summary.json under out_dir. Exit code 0 iff the run completed and every
/// gating invariant held.
RunOutcome run_command(const RunConfig& cfg, const std::string& out_dir);

struct StudyRow {
  std::string phase;  // "N" (fixed M) or "M" (fixed N)
  std::size_t n_a = 0, m_a = 0, n_b = 0, m_b = 0;
  double u_l2 = 0.0;
  double d_w12 = 0.0;
  double theta_l1 = 0.0;
  bool aborted = false;
};

struct StudyReport {
  std::vector<StudyRow> rows;
  std::string csv;
};

/// Pairwise end-state differences over N_list at the config's M, then over
/// M_list at N = max(N_list). Writes study.csv under out_dir (when nonempty).
StudyReport convergence_study(const RunConfig& base, const std::vector<std::size_t>& n_list,
                              const std::vector<std::size_t>& m_list, const std::string& out_dir);

/// End-state differences used by the study.
StudyRow state_difference(const Grid& grid, const FieldState& a, const FieldState& b);

struct HeatmapInfo {
  int width = 0;
  int height = 0;
  double min = 0.0;
  double max = 0.0;
  bool constant = false;
};

/// Grayscale binary PGM of a 2D slice (z index `slice` in 3D) over the physical
/// domain, linear min-max scaling, row 0 at y = 0. Min and max go to path + ".txt".
HeatmapInfo emit_heatmap(const Grid& grid, const Field& f, const std::string& path, int slice = 0);

/// JSON audit of a stored snapshot against a config.
struct AuditOutcome {
  int exit_code = 0;
  std::string json;
};
AuditOutcome audit_snapshot(const std::string& snapshot_path, const RunConfig& cfg);

}  // namespace nematic
