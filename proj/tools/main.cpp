// vmadmm: config-driven runner for the variable-metric proximal ADMM.
//
//   vmadmm solve  --config run.toml [--iters N] [--force] [--out DIR]
//   vmadmm oracle --config run.toml [--budget N] [--out DIR]
//   vmadmm check  --log iterates.csv --against oracle.json

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vmadmm/catalog.hpp"
#include "vmadmm/config.hpp"
#include "vmadmm/experiment.hpp"
#include "vmadmm/oracle.hpp"

namespace {

constexpr int kUsageError = 3;

int cmd_solve(const std::string& config, std::optional<std::size_t> iters, bool force,
              const std::optional<std::string>& out) {
  const vmadmm::RunConfig cfg = vmadmm::load_config(config);
  vmadmm::ExperimentOptions opts;
  opts.iters = iters;
  opts.force = force;
  opts.out_dir = out;
  opts.report = &std::cout;
  const auto res = vmadmm::run_experiment(cfg, opts);
  std::cout << "wrote " << res.output_dir << " (exit " << res.exit_code << ")\n";
  return res.exit_code;
}

int cmd_oracle(const std::string& config, std::optional<std::size_t> budget,
               const std::optional<std::string>& out) {
  const vmadmm::RunConfig cfg = vmadmm::load_config(config);
  const auto prob = vmadmm::build_problem(cfg.problem, cfg.c, cfg.seed);
  const auto o = vmadmm::compute_oracle(prob.spec, budget.value_or(cfg.oracle_budget));
  const std::filesystem::path dir(vmadmm::resolve_output_dir(cfg, out));
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "oracle.json").string();
  vmadmm::write_oracle_json(path, cfg.problem.name, prob.spec, o);
  std::cout << "oracle kkt " << o.kkt << " after " << o.iterations << " iterations ("
            << o.method << "), wrote " << path << "\n";
  return 0;
}

int cmd_check(const std::string& log, const std::string& against) {
  const auto rep = vmadmm::check_log(log, against);
  for (const auto& m : rep.messages) std::cout << m << "\n";
  std::cout << (rep.passed ? "check passed" : "check FAILED") << "\n";
  return rep.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-metric proximal ADMM runner and diagnostics"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::size_t> iters;
  std::optional<std::size_t> budget;
  std::optional<std::string> out;
  bool force = false;
  std::string log_path;
  std::string oracle_path;

  auto* solve = app.add_subcommand("solve", "Run an experiment described by a config file");
  solve->add_option("--config", config, "Run config (TOML subset)")->required()->check(CLI::ExistingFile);
  solve->add_option("--iters", iters, "Override the iteration count");
  solve->add_flag("--force", force, "Run even if no convergence theorem applies");
  solve->add_option("--out", out, "Output directory (overrides $VMADMM_OUT_DIR and the config)");

  auto* oracle = app.add_subcommand("oracle", "Compute a certified saddle point");
  oracle->add_option("--config", config, "Run config (TOML subset)")->required()->check(CLI::ExistingFile);
  oracle->add_option("--budget", budget, "Iteration budget");
  oracle->add_option("--out", out, "Output directory");

  auto* check = app.add_subcommand("check", "Validate an iterate log against an oracle file");
  check->add_option("--log", log_path, "iterates.csv")->required()->check(CLI::ExistingFile);
  check->add_option("--against", oracle_path, "oracle.json")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(config, iters, force, out);
    if (*oracle) return cmd_oracle(config, budget, out);
    if (*check) return cmd_check(log_path, oracle_path);
  } catch (const vmadmm::Error& e) {
    std::cerr << "error (" << vmadmm::to_string(e.code()) << "): " << e.what() << "\n";
    return e.code() == vmadmm::ErrorCode::kParse ? kUsageError : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsageError;
}
