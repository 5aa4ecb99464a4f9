#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "glqr/csv.hpp"
#include "glqr/errors.hpp"
#include "glqr/pipeline.hpp"
#include "glqr/version.hpp"

namespace {

struct CommonFlags {
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  bool quiet = false;
};

void attach_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--output-dir", flags.output_dir, "Override the output directory");
  cmd->add_option("--seed", flags.seed, "Override the initial-condition seed");
  cmd->add_option("--steps", flags.steps, "Override the time-step count");
  cmd->add_flag("--quiet", flags.quiet, "Suppress progress output");
}

glqr::RunOptions to_options(const std::string& config, const CommonFlags& flags) {
  glqr::RunOptions options;
  options.config_path = config;
  options.output_dir_override = flags.output_dir;
  options.seed_override = flags.seed;
  options.steps_override = flags.steps;
  options.quiet = flags.quiet;
  return options;
}

int guarded(const char* category, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << "error(" << category << "): " << e.what() << '\n';
    return glqr::exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network LQR synthesis via invariant-subspace decomposition"};
  app.set_version_flag("--version", std::string(glqr::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  CommonFlags flags;

  auto* run = app.add_subcommand("run", "Run the configured experiment pipeline");
  run->add_option("config", config_path, "Experiment configuration file")->required();
  attach_common(run, flags);

  auto* oracle = app.add_subcommand("oracle", "Run only the centralized direct solve");
  oracle->add_option("config", config_path)->required();
  attach_common(oracle, flags);

  auto* check = app.add_subcommand(
      "check", "Evaluate the invariance and low-rank certificates");
  check->add_option("config", config_path)->required();
  attach_common(check, flags);

  std::string sbm_out;
  auto* sbm = app.add_subcommand("sbm-gen", "Sample the configured block model");
  sbm->add_option("config", config_path)->required();
  sbm->add_option("-o,--output", sbm_out, "Adjacency CSV destination")->required();
  attach_common(sbm, flags);

  std::string traj_a, traj_b;
  std::optional<double> cost_a, cost_b;
  int compare_dim = 1;
  auto* cmp = app.add_subcommand("compare", "Compare two trajectory CSV files");
  cmp->add_option("trajA", traj_a)->required();
  cmp->add_option("trajB", traj_b)->required();
  cmp->add_option("--dim", compare_dim, "State dimension per agent (default 1)");
  cmp->add_option("--cost-a", cost_a, "Cost associated with trajA");
  cmp->add_option("--cost-b", cost_b, "Cost associated with trajB");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return guarded("run", [&] {
      glqr::run_experiment(to_options(config_path, flags));
      return glqr::kExitOk;
    });

  if (oracle->parsed())
    return guarded("oracle", [&] {
      glqr::run_oracle(to_options(config_path, flags));
      return glqr::kExitOk;
    });

  if (check->parsed())
    return guarded("check", [&] {
      return glqr::run_check(to_options(config_path, flags), flags.quiet);
    });

  if (sbm->parsed())
    return guarded("sbm-gen", [&] {
      auto options = to_options(config_path, flags);
      glqr::ExperimentConfig cfg = glqr::load_config(options.config_path);
      if (options.seed_override) cfg.sbm.seed = *options.seed_override;
      glqr::write_matrix_csv(sbm_out, glqr::sample_sbm(cfg.sbm));
      if (!flags.quiet) std::cout << "[glqr] wrote " << sbm_out << '\n';
      return glqr::kExitOk;
    });

  if (cmp->parsed())
    return guarded("compare", [&] {
      const auto a = glqr::read_trajectory_csv(traj_a, compare_dim);
      const auto b = glqr::read_trajectory_csv(traj_b, compare_dim);
      glqr::Trajectory ta{a.time_grid, a.values, a.values};
      glqr::Trajectory tb{b.time_grid, b.values, b.values};
      const auto report = glqr::compare(ta, cost_a.value_or(0.0), tb,
                                        cost_b.value_or(0.0));
      std::cout << "state_diff_l2 = " << glqr::format_double(report.state_diff_l2)
                << '\n'
                << "max_state_diff = " << glqr::format_double(report.max_state_diff)
                << '\n';
      if (cost_a && cost_b)
        std::cout << "cost_gap_percent = "
                  << glqr::format_double(report.cost_gap_percent) << '\n';
      return glqr::kExitOk;
    });

  return glqr::kExitUnexpected;
}
