#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vmadmm/catalog.hpp"
#include "vmadmm/schedule.hpp"

namespace vmadmm {

/// A metric schedule as written in a config file.
///
///   kind = "zero" | "scaled_identity" | "diagonal" | "shifted_gram"
///   mu = 1.0              (scaled_identity)
///   entries = [1.0, 2.0]  (diagonal)
///   tau = 0.2 | taus = [0.2, 0.19]  (shifted_gram; c and A come from the problem)
///   rho = 0.5             (optional geometric decay M^k = rho^k M^0, not for shifted_gram)
struct MetricConfig {
  std::string kind = "zero";
  double mu = 0.0;
  std::vector<double> entries;
  std::vector<double> taus;
  double rho = 1.0;

  bool operator==(const MetricConfig&) const = default;
};

/// Initial iterate; an empty optional means zeros.
struct InitConfig {
  std::optional<std::vector<double>> x;
  std::optional<std::vector<double>> z;
  std::optional<std::vector<double>> y;

  bool operator==(const InitConfig&) const = default;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t iters = 1000;
  double c = 1.0;
  /// Diagnostics to evaluate, see known_checks().
  std::vector<std::string> checks = {"kkt"};
  /// Stop early once the KKT residual drops below this value.
  std::optional<double> kkt_target;
  std::size_t oracle_budget = 1000000;
  /// Probes per checked iteration for the probe-based checks.
  std::size_t probes = 20;
  /// Probe-based checks run every `probe_every` iterations.
  std::size_t probe_every = 10;
  ProblemParams problem;
  MetricConfig m1;
  MetricConfig m2;
  InitConfig init;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

const std::vector<std::string>& known_checks();

/// Parses the TOML subset used by run configs: `key = value` lines, `[table]`
/// headers, `#` comments, strings, numbers, booleans and one-line arrays.
/// Errors are reported as ParseError with the file path and line.
RunConfig parse_config(const std::string& text, const std::string& path = "<string>");
RunConfig load_config(const std::string& path);

/// Canonical form: top-level keys sorted, then tables sorted by name with
/// sorted keys; numbers with 17 significant digits.
std::string serialize_config(const RunConfig& cfg);

/// Builds the schedule for M1 (dim n) or M2 (dim m) of `p`.
MetricSchedule build_schedule(const MetricConfig& mc, const ProblemSpec& p, bool for_m1);

}  // namespace vmadmm
