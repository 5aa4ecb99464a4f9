#include "glqr/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "glqr/csv.hpp"
#include "glqr/errors.hpp"
#include "glqr/random.hpp"
#include "glqr/version.hpp"

namespace glqr {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

GridFunction sample_initial(int grid_size, int dim, std::uint64_t seed, double lo,
                            double hi) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd values(grid_size, dim);
  for (int i = 0; i < grid_size; ++i)
    for (int c = 0; c < dim; ++c) values(i, c) = uniform_double(rng, lo, hi);
  return GridFunction(std::move(values));
}

Graphon kernel_from_source(ExperimentConfig::KernelSource source,
                           const Graphon& a, const SbmSpec& spec, bool sampled,
                           std::uint64_t seed_offset) {
  switch (source) {
    case ExperimentConfig::KernelSource::kSameAsA:
      return a;
    case ExperimentConfig::KernelSource::kZero:
      return Graphon(StepGraphon::zero(spec.total_size()));
    case ExperimentConfig::KernelSource::kSample: {
      if (!sampled) return a;  // block limits are deterministic; reuse
      SbmSpec shifted = spec;
      shifted.seed = spec.seed + seed_offset;
      return Graphon(StepGraphon(sample_sbm(shifted), 1.0));
    }
  }
  throw ConfigError("config: bad kernel source");
}

// The four kernels named by the coupling section.
struct Kernels {
  Graphon A, B, Q, QT;
  int grid_size = 0;
};

Kernels build_kernels(const ExperimentConfig& cfg) {
  Kernels out;
  switch (cfg.coupling) {
    case ExperimentConfig::CouplingType::kCsv: {
      auto load = [&cfg](const std::string& path, int fallback_size) -> Graphon {
        if (path.empty()) return Graphon(StepGraphon::zero(fallback_size));
        const Eigen::MatrixXd w = read_matrix_csv(path);
        const double bound =
            cfg.bound > 0 ? cfg.bound
                          : (w.size() > 0 ? w.cwiseAbs().maxCoeff() : 0.0);
        return Graphon(step_from_matrix(w, bound));
      };
      out.A = load(cfg.a_path, 1);
      out.grid_size = out.A.native_grid();
      out.B = load(cfg.b_path, out.grid_size);
      out.Q = load(cfg.q_path, out.grid_size);
      out.QT = load(cfg.qt_path, out.grid_size);
      break;
    }
    case ExperimentConfig::CouplingType::kDictionary: {
      out.A = Graphon(DictionaryGraphon(cfg.dictionary, cfg.dict_A));
      out.B = Graphon(DictionaryGraphon(cfg.dictionary, cfg.dict_B));
      out.Q = Graphon(DictionaryGraphon(cfg.dictionary, cfg.dict_Q));
      out.QT = Graphon(DictionaryGraphon(cfg.dictionary, cfg.dict_QT));
      out.grid_size = cfg.dict_grid;
      break;
    }
    case ExperimentConfig::CouplingType::kSbm:
    case ExperimentConfig::CouplingType::kBlock: {
      const bool sampled = cfg.coupling == ExperimentConfig::CouplingType::kSbm;
      const Eigen::MatrixXd w =
          sampled ? sample_sbm(cfg.sbm) : sbm_expected_weights(cfg.sbm);
      out.A = Graphon(StepGraphon(w, 1.0));
      out.grid_size = cfg.sbm.total_size();
      // Independent samples advance the seed so A and B differ.
      out.B = kernel_from_source(cfg.b_source, out.A, cfg.sbm, sampled, 1);
      out.Q = kernel_from_source(cfg.q_source, out.A, cfg.sbm, sampled, 2);
      out.QT = kernel_from_source(cfg.qt_source, out.A, cfg.sbm, sampled, 3);
      break;
    }
  }
  return out;
}

SubspaceBasis build_basis(const ExperimentConfig& cfg, const Graphon& designated) {
  switch (cfg.basis_source) {
    case ExperimentConfig::BasisSource::kEigenbasis:
      return SubspaceBasis::eigenbasis(designated, cfg.subspace_dim);
    case ExperimentConfig::BasisSource::kGridCsv:
      return SubspaceBasis::from_grid(read_matrix_csv(cfg.basis_path));
    case ExperimentConfig::BasisSource::kDictionary: {
      std::vector<TrigCombo> combos;
      for (const TrigFunction& f : cfg.basis_elements) combos.emplace_back(f);
      return SubspaceBasis::from_trig(combos);
    }
  }
  throw ConfigError("config: bad basis source");
}

std::string mode_name(LawMode mode) {
  return mode == LawMode::kExact ? "exact" : "approximate";
}

std::string basis_provenance(const ExperimentConfig& cfg) {
  switch (cfg.basis_source) {
    case ExperimentConfig::BasisSource::kEigenbasis:
      return "eigenbasis(A, d=" + std::to_string(cfg.subspace_dim) + ")";
    case ExperimentConfig::BasisSource::kGridCsv:
      return "grid_csv:" + cfg.basis_path;
    case ExperimentConfig::BasisSource::kDictionary: {
      std::string s = "dictionary:";
      for (std::size_t i = 0; i < cfg.basis_elements.size(); ++i)
        s += (i ? "," : "") + cfg.basis_elements[i].name();
      return s;
    }
  }
  return "?";
}

// Ordered key=value writer; ordering keeps reruns byte-identical.
class KeyValueFile {
 public:
  void add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
  }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, long value) { add(key, std::to_string(value)); }

  void write_text(const fs::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConstructionError("cannot write " + path.string());
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  }

  void write_json(const fs::path& path) const {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : entries_) {
      char* end = nullptr;
      const double num = std::strtod(v.c_str(), &end);
      if (end && *end == '\0' && !v.empty())
        j[k] = num;
      else
        j[k] = v;
    }
    std::ofstream out(path);
    if (!out) throw ConstructionError("cannot write " + path.string());
    out << j.dump(2) << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void note(const RunOptions& options, const std::string& msg) {
  if (!options.quiet) std::cout << "[glqr] " << msg << '\n';
}

void export_law(const fs::path& dir, const std::string& prefix,
                const ControlLaw& law) {
  write_riccati_csv(dir / (prefix + "riccati_projected.csv"), law.projected);
  write_riccati_csv(dir / (prefix + "riccati_auxiliary.csv"), law.auxiliary);
  std::vector<Eigen::MatrixXd> proj_gains, aux_gains;
  for (int k = 0; k <= law.projected.steps(); ++k) {
    const double t = law.projected.time(k);
    proj_gains.push_back(law.projected_gain(t));
    aux_gains.push_back(law.auxiliary_gain(t));
  }
  write_matrix_series_csv(dir / (prefix + "gains_projected.csv"), proj_gains);
  write_matrix_series_csv(dir / (prefix + "gains_auxiliary.csv"), aux_gains);
}

void add_comparison(KeyValueFile& report, const std::string& prefix,
                    const ComparisonReport& cmp) {
  report.add(prefix + "state_diff_l2", cmp.state_diff_l2);
  report.add(prefix + "max_state_diff", cmp.max_state_diff);
  report.add(prefix + "cost", cmp.cost_a);
  report.add(prefix + "cost_oracle", cmp.cost_b);
  report.add(prefix + "cost_gap_percent", cmp.cost_gap_percent);
  report.add(prefix + "wall_seconds", cmp.wall_a);
  report.add(prefix + "wall_oracle_seconds", cmp.wall_b);
}

constexpr int kOracleCap = 512;

}  // namespace

ExperimentSetup build_setup(const RunOptions& options) {
  ExperimentConfig cfg = load_config(options.config_path);
  if (options.seed_override) cfg.init_seed = *options.seed_override;
  if (options.steps_override) cfg.steps = *options.steps_override;
  if (!options.output_dir_override.empty())
    cfg.output_dir = options.output_dir_override;

  Kernels kernels = build_kernels(cfg);
  const int grid_size = kernels.grid_size;

  CouplingModel model;
  std::optional<OscillatorModel> oscillator;
  std::optional<OscillatorModel> oscillator_limit;

  if (cfg.mode == ExperimentConfig::Mode::kOscillator) {
    if (!kernels.A.is_step())
      throw ConfigError("config: oscillator coupling must be a step graphon");
    if (cfg.basis_source != ExperimentConfig::BasisSource::kEigenbasis)
      throw ConfigError("config: oscillator mode uses the eigenbasis subspace source");
    OscillatorModel osc{cfg.alpha, cfg.beta,         cfg.osc_Q, cfg.osc_QT,
                        cfg.eta,   kernels.A.step(), cfg.subspace_dim,
                        cfg.horizon};
    model = expand_oscillator(osc);
    if (cfg.coupling == ExperimentConfig::CouplingType::kSbm ||
        cfg.coupling == ExperimentConfig::CouplingType::kBlock) {
      OscillatorModel limit = osc;
      limit.graphon = StepGraphon(sbm_expected_weights(cfg.sbm));
      oscillator_limit = std::move(limit);
    }
    oscillator = std::move(osc);
  } else {
    model = CouplingModel{cfg.L_a,   cfg.D_a,   cfg.L_b,   cfg.D_b,
                          cfg.L_q,   cfg.D_q,   cfg.L_qT,  cfg.D_qT,
                          kernels.A, kernels.B, kernels.Q, kernels.QT,
                          cfg.horizon};
  }

  SubspaceBasis basis =
      cfg.mode == ExperimentConfig::Mode::kOscillator
          ? SubspaceBasis::eigenbasis(model.A_g, cfg.subspace_dim)
          : build_basis(cfg, kernels.A);
  if (basis.is_grid() && basis.native_grid() != grid_size)
    throw ConfigError("config: basis grid does not match the coupling grid");

  GridFunction x0 = sample_initial(grid_size, model.state_dim(), cfg.init_seed,
                                   cfg.init_lo, cfg.init_hi);
  return ExperimentSetup{std::move(cfg),   std::move(model),
                         std::move(basis), std::move(x0),
                         grid_size,        std::move(oscillator),
                         std::move(oscillator_limit)};
}

void run_experiment(const RunOptions& options) {
  const auto t_total = Clock::now();
  ExperimentSetup setup = build_setup(options);
  const ExperimentConfig& cfg = setup.config;
  const int N = setup.grid_size;
  const int n = setup.model.state_dim();
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);

  WarningSink warn = [&](const std::string& msg) {
    if (!options.quiet) std::cout << "[glqr] warning: " << msg << '\n';
  };

  // Synthesis.
  const auto t_synth = Clock::now();
  ControlLaw law = [&]() -> ControlLaw {
    switch (cfg.mode) {
      case ExperimentConfig::Mode::kExact:
        return synthesize_exact(setup.model, setup.basis, cfg.steps);
      case ExperimentConfig::Mode::kApproximate:
        return synthesize_approximate(setup.model, setup.basis, cfg.steps, warn);
      case ExperimentConfig::Mode::kOscillator:
        return synthesize_approximate(setup.model, setup.basis, cfg.steps, warn);
    }
    throw ConfigError("config: bad mode");
  }();
  const double wall_synth = seconds_since(t_synth);
  note(options, "synthesized " + mode_name(law.mode) + " law in " +
                    format_double(wall_synth) + " s");

  // Decomposed closed loop.
  Trajectory traj = simulate(setup.model, law, setup.x0, cfg.steps);
  const double cost = evaluate_cost(setup.model, traj);
  write_trajectory_csv(dir / "states.csv", traj.time_grid, traj.states);
  write_trajectory_csv(dir / "controls.csv", traj.time_grid, traj.controls);
  export_law(dir, "", law);

  KeyValueFile report;
  report.add("mode", mode_name(law.mode));
  report.add("cost", cost);

  // Graphon-limit law for oscillator experiments backed by a block model.
  std::optional<Trajectory> limit_traj;
  double limit_cost = 0.0, wall_limit = 0.0;
  if (setup.oscillator_limit) {
    const auto t_limit = Clock::now();
    ControlLaw limit_law = oscillator_law(*setup.oscillator_limit, cfg.steps);
    wall_limit = seconds_since(t_limit);
    limit_traj = simulate(setup.model, limit_law, setup.x0, cfg.steps);
    limit_cost = evaluate_cost(setup.model, *limit_traj);
    write_trajectory_csv(dir / "graphon_states.csv", limit_traj->time_grid,
                         limit_traj->states);
    write_trajectory_csv(dir / "graphon_controls.csv", limit_traj->time_grid,
                         limit_traj->controls);
    export_law(dir, "graphon_", limit_law);
    report.add("graphon_cost", limit_cost);
  }

  // Centralized oracle within the desk-scale cap.
  double wall_oracle = 0.0;
  const long nN = static_cast<long>(n) * N;
  if (nN <= kOracleCap) {
    const CouplingModel discrete = discretize_model(setup.model, N);
    const auto t_oracle = Clock::now();
    OracleResult oracle = oracle_solve(discrete, setup.x0.stacked(), cfg.steps);
    wall_oracle = seconds_since(t_oracle);
    write_trajectory_csv(dir / "oracle_states.csv", oracle.trajectory.time_grid,
                         oracle.trajectory.states);
    write_trajectory_csv(dir / "oracle_controls.csv", oracle.trajectory.time_grid,
                         oracle.trajectory.controls);

    ComparisonReport cmp = compare(traj, cost, oracle.trajectory, oracle.cost);
    cmp.wall_a = wall_synth;
    cmp.wall_b = wall_oracle;
    add_comparison(report, "", cmp);
    note(options, "cost gap vs oracle: " + format_double(cmp.cost_gap_percent) + " %");

    if (limit_traj) {
      ComparisonReport lcmp =
          compare(*limit_traj, limit_cost, oracle.trajectory, oracle.cost);
      lcmp.wall_a = wall_limit;
      lcmp.wall_b = wall_oracle;
      add_comparison(report, "graphon_", lcmp);
    }
  } else {
    report.add("oracle", std::string("skipped: n*N = ") + std::to_string(nN) +
                             " exceeds cap " + std::to_string(kOracleCap));
  }

  report.write_text(dir / "report.txt");
  report.write_json(dir / "report.json");

  KeyValueFile manifest;
  manifest.add("tool_version", std::string(kVersion));
  manifest.add("config_path", options.config_path);
  manifest.add("config_hash", hash_file(options.config_path));
  manifest.add("law_mode", mode_name(law.mode));
  manifest.add("basis", basis_provenance(cfg));
  manifest.add("n", static_cast<long>(n));
  manifest.add("N", static_cast<long>(N));
  manifest.add("d", static_cast<long>(setup.basis.dim()));
  manifest.add("steps", static_cast<long>(cfg.steps));
  manifest.add("horizon", cfg.horizon);
  manifest.add("init_seed", static_cast<long>(cfg.init_seed));
  if (cfg.coupling == ExperimentConfig::CouplingType::kSbm)
    manifest.add("sbm_seed", static_cast<long>(cfg.sbm.seed));
  manifest.add("certificate_tolerance", kCertificateTolerance);
  manifest.add("residual_norm_a", law.residual_norms.a);
  manifest.add("residual_norm_b", law.residual_norms.b);
  manifest.add("residual_norm_q", law.residual_norms.q);
  manifest.add("residual_norm_qT", law.residual_norms.qT);
  manifest.add("wall_synth_seconds", wall_synth);
  manifest.add("wall_oracle_seconds", wall_oracle);
  manifest.add("wall_total_seconds", seconds_since(t_total));
  manifest.write_text(dir / "manifest.txt");

  note(options, "wrote " + dir.string());
}

void run_oracle(const RunOptions& options) {
  ExperimentSetup setup = build_setup(options);
  const fs::path dir = setup.config.output_dir;
  fs::create_directories(dir);
  const CouplingModel discrete = discretize_model(setup.model, setup.grid_size);
  const auto t0 = Clock::now();
  OracleResult oracle = oracle_solve(discrete, setup.x0.stacked(), setup.config.steps);
  const double wall = seconds_since(t0);
  write_trajectory_csv(dir / "oracle_states.csv", oracle.trajectory.time_grid,
                       oracle.trajectory.states);
  write_trajectory_csv(dir / "oracle_controls.csv", oracle.trajectory.time_grid,
                       oracle.trajectory.controls);
  KeyValueFile report;
  report.add("cost_oracle", oracle.cost);
  report.add("wall_oracle_seconds", wall);
  report.write_text(dir / "oracle_report.txt");
  note(options, "oracle cost " + format_double(oracle.cost));
}

int run_check(const RunOptions& options, bool quiet) {
  ExperimentSetup setup = build_setup(options);
  const char* names[4] = {"A", "B", "Q", "Q_T"};
  const Graphon* graphons[4] = {&setup.model.A_g, &setup.model.B_g,
                                &setup.model.Q_g, &setup.model.QT_g};
  bool exact_ok = true;
  for (int i = 0; i < 4; ++i) {
    const double inv = check_invariance(*graphons[i], setup.basis);
    const double low = check_lowrank(*graphons[i], setup.basis);
    const double tol = certificate_threshold(*graphons[i]);
    exact_ok = exact_ok && inv <= tol && low <= tol;
    if (!quiet)
      std::cout << "operator " << names[i] << ": invariance = " << format_double(inv)
                << ", lowrank = " << format_double(low)
                << ", threshold = " << format_double(tol) << '\n';
  }
  if (exact_ok) {
    if (!quiet) std::cout << "certificates: exact synthesis admissible\n";
    return kExitOk;
  }
  if (!quiet) std::cout << "certificates: approximate synthesis only\n";
  return kExitApproximateOnly;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const CertificateError*>(&e)) return kExitCertificate;
  if (dynamic_cast<const IntegrationError*>(&e)) return kExitIntegration;
  if (dynamic_cast<const DimensionError*>(&e)) return kExitData;
  if (dynamic_cast<const ConstructionError*>(&e)) return kExitData;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return kExitData;
  if (dynamic_cast<const std::out_of_range*>(&e)) return kExitData;
  return kExitUnexpected;
}

}  // namespace glqr
