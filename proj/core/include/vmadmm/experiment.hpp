#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vmadmm/config.hpp"
#include "vmadmm/oracle.hpp"
#include "vmadmm/solver.hpp"

namespace vmadmm {

/// Environment variable that overrides the config's output directory.
inline constexpr const char* kOutDirEnv = "VMADMM_OUT_DIR";

/// Precedence: explicit override, then $VMADMM_OUT_DIR, then the config value.
std::string resolve_output_dir(const RunConfig& cfg,
                               const std::optional<std::string>& override_dir);

struct ExperimentOptions {
  std::optional<std::size_t> iters;
  bool force = false;
  std::optional<std::string> out_dir;
  /// Human-readable progress (assumption report, check results). May be null.
  std::ostream* report = nullptr;
};

struct CheckOutcome {
  std::string name;
  /// Hard checks decide the exit code; soft ones are findings.
  bool hard = true;
  bool passed = true;
  std::string detail;
};

/// One IterateLog row. Undefined entries are nullopt (written as NA).
struct IterateRow {
  std::size_t k = 0;
  double primal_objective = 0.0;
  std::optional<double> lagrangian_at_probe;
  double residual_primal = 0.0;
  std::optional<double> u_k;
  std::optional<double> v_k;
  std::optional<double> v_slack;
  std::optional<double> gap;
  std::optional<double> gap_bound;
  double kkt = 0.0;
};

struct ExperimentResult {
  /// 0 when every hard check passed, 1 on a failed check, 2 when the
  /// assumption gate refused the run.
  int exit_code = 0;
  AssumptionReport assumptions;
  std::vector<CheckOutcome> checks;
  std::vector<IterateRow> rows;
  std::optional<OracleResult> oracle;
  double final_kkt = 0.0;
  std::optional<double> min_gap_slack;
  std::optional<double> min_v_slack;
  std::optional<double> rate_slope;
  std::size_t uncorrected_v_violations = 0;
  std::string output_dir;
};

/// Builds the problem, validates the metric schedules, runs the solver and the
/// requested checks, and writes iterates.csv, summary.json and config.toml
/// (plus oracle.json when an oracle was needed) to the output directory.
ExperimentResult run_experiment(const RunConfig& cfg, const ExperimentOptions& options = {});

/// CSV header of the iterate log.
const std::string& iterate_log_header();
std::string format_row(const IterateRow& row);
void write_iterate_log(std::ostream& out, const std::vector<IterateRow>& rows);

/// Writes the oracle triple, its KKT residual and the optimal value.
void write_oracle_json(const std::string& path, const std::string& problem,
                       const ProblemSpec& p, const OracleResult& o);
OracleResult read_oracle_json(const std::string& path, double* optimal_value = nullptr);

struct LogCheckReport {
  bool passed = true;
  std::size_t rows = 0;
  std::vector<std::string> messages;
};

/// Validates an iterate log against an oracle file: k strictly increasing,
/// every entry finite or marked, objective never below the oracle optimum
/// (beyond 1e-8), gap within its bound (1e-8), v_slack >= -1e-10.
LogCheckReport check_log(const std::string& csv_path, const std::string& oracle_path);

}  // namespace vmadmm
