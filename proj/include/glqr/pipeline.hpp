#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "glqr/config.hpp"
#include "glqr/control.hpp"
#include "glqr/riccati.hpp"
#include "glqr/sim.hpp"
#include "glqr/subspace.hpp"

namespace glqr {

struct RunOptions {
  std::string config_path;
  std::string output_dir_override;         // empty: use the config's directory
  std::optional<std::uint64_t> seed_override;  // replaces the init seed
  std::optional<int> steps_override;
  bool quiet = false;
};

// Model, basis and initial condition materialized from a configuration.
struct ExperimentSetup {
  ExperimentConfig config;
  CouplingModel model;      // oscillator configs arrive pre-expanded
  SubspaceBasis basis;
  GridFunction x0;
  int grid_size = 0;
  // oscillator extras
  std::optional<OscillatorModel> oscillator;
  std::optional<OscillatorModel> oscillator_limit;  // block-model limit coupling
};

ExperimentSetup build_setup(const RunOptions& options);

// Full pipeline: synthesize, simulate, run the centralized oracle when the
// problem is within the desk-scale cap, emit CSVs, a comparison report and a
// manifest. Throws on failure; the CLI maps exception types to exit codes.
void run_experiment(const RunOptions& options);

// Oracle-only pipeline (direct centralized solve and exports).
void run_oracle(const RunOptions& options);

// Certificate check. Returns 0 when every coupling passes the exact low-rank
// certificates, 6 when the span is usable but only approximately (low-rank
// fails), 3 when the invariance certificate itself fails.
int run_check(const RunOptions& options, bool quiet);

// Exit-code mapping shared by all subcommands.
int exit_code_for(const std::exception& e);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCertificate = 3;
inline constexpr int kExitIntegration = 4;
inline constexpr int kExitData = 5;
inline constexpr int kExitApproximateOnly = 6;

}  // namespace glqr
