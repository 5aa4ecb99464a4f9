// Acceptance suite: end-to-end checks of the decomposition library against
// the centralized direct solver, printing one pass/fail line per criterion.
// Run from the repository root so the bundled configs resolve.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "glqr/csv.hpp"
#include "glqr/errors.hpp"
#include "glqr/pipeline.hpp"
#include "glqr/sim.hpp"
#include "test_helpers.hpp"

using namespace glqr;
using namespace glqr::testing;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// --- Criterion 1: oracle equivalence on random exact rank-d instances -------

void criterion_oracle_equivalence() {
  const auto start = Clock::now();
  struct Instance {
    int N, n, d;
  };
  const std::vector<Instance> instances = {
      {4, 1, 1}, {8, 1, 2}, {16, 1, 3}, {4, 2, 1}, {8, 2, 2},
      {16, 2, 3}, {8, 1, 1}, {16, 1, 2}, {4, 1, 3}, {16, 2, 1}};
  std::mt19937_64 rng(2024);
  const int M = 200;
  double worst_state = 0.0, worst_cost = 0.0;
  bool ok = true;
  for (const Instance& inst : instances) {
    Eigen::MatrixXd phi;
    const CouplingModel model =
        random_rank_d_model(rng, inst.N, inst.n, inst.d, &phi);
    const SubspaceBasis basis = SubspaceBasis::from_grid(phi);
    const GridFunction x0 = random_grid_function(rng, inst.N, inst.n, 5.0);

    const ControlLaw law = synthesize_exact(model, basis, M);
    const Trajectory decomposed = simulate(model, law, x0, M);
    const double cost = evaluate_cost(model, decomposed);
    const OracleResult oracle = oracle_solve(model, x0.stacked(), M);
    const ComparisonReport cmp =
        compare(decomposed, cost, oracle.trajectory, oracle.cost);

    // Controls must agree as well as states.
    double control_gap = 0.0, control_ref = 0.0;
    for (int k = 0; k <= M; ++k) {
      control_gap = std::max(control_gap,
                             (decomposed.controls[k].values() -
                              oracle.trajectory.controls[k].values())
                                 .cwiseAbs()
                                 .maxCoeff());
      control_ref = std::max(
          control_ref, oracle.trajectory.controls[k].values().cwiseAbs().maxCoeff());
    }
    const double rel_cost = std::abs(cost - oracle.cost) / std::abs(oracle.cost);
    worst_state = std::max(worst_state, cmp.state_diff_l2);
    worst_cost = std::max(worst_cost, rel_cost);
    ok = ok && cmp.state_diff_l2 <= 1e-6 && rel_cost <= 1e-8 &&
         control_gap <= 1e-6 * std::max(1.0, control_ref);
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 30.0;
  report("oracle equivalence on 10 exact rank-d instances", ok,
         "worst state gap " + fmt(worst_state) + ", worst cost gap " +
             fmt(worst_cost) + ", " + fmt(elapsed) + " s");
}

// --- Criterion 2: projections of the trigonometric kernels ------------------

void criterion_trig_fixtures() {
  const CouplingModel model = trig_model();
  const SubspaceBasis basis = trig_basis();
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);

  const Eigen::Matrix2d A_expected{{1.0, 0.5}, {0.5, 1.0}};
  const Eigen::Matrix2d B_expected{{-0.5, 0.0}, {0.0, 0.5}};
  const Eigen::Matrix2d Q_expected{{0.5, 0.0}, {0.0, 0.0}};
  const Eigen::Matrix2d QT_expected{{0.0, 0.0}, {0.0, 0.5}};

  double worst = 0.0;
  auto defect = [&](const Graphon& g, const Eigen::Matrix2d& expected) {
    worst = std::max(worst, (project_operator(one, g, basis) - expected)
                                .cwiseAbs()
                                .maxCoeff());
  };
  defect(model.A_g, A_expected);
  defect(model.B_g, B_expected);
  defect(model.Q_g, Q_expected);
  defect(model.QT_g, QT_expected);

  // Cross-check against the raw kernel formulas sampled on a fine grid; the
  // midpoint rule resolves these trigonometric kernels exactly.
  const int N = 64;
  auto sampled = [N](auto kernel) {
    Eigen::MatrixXd W(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        W(i, j) = kernel((i + 0.5) / N, (j + 0.5) / N);
    return StepGraphon(0.5 * (W + W.transpose()));
  };
  const double tau = 6.283185307179586476925286766559;
  const Graphon A_raw(sampled([&](double x, double y) {
    return 2.0 * std::cos(tau * (x - y)) + std::sin(tau * (x + y));
  }));
  const Graphon B_raw(
      sampled([&](double x, double y) { return std::cos(tau * (x + y)); }));
  const Graphon Q_raw(sampled(
      [&](double x, double y) { return std::sin(tau * x) * std::sin(tau * y); }));
  const Graphon QT_raw(sampled(
      [&](double x, double y) { return std::cos(tau * x) * std::cos(tau * y); }));
  defect(A_raw, A_expected);
  defect(B_raw, B_expected);
  defect(Q_raw, Q_expected);
  defect(QT_raw, QT_expected);

  report("trigonometric kernel projection fixtures", worst <= 1e-10,
         "worst entry defect " + fmt(worst));
}

// --- Criterion 3: Riccati correctness ---------------------------------------

void criterion_riccati() {
  auto scalar = [](double v) { return Eigen::MatrixXd::Constant(1, 1, v); };
  const double T = 1.0, q = 2.0, a = 0.7;
  const int M = 200;

  double worst = 0.0;
  const RiccatiTrajectory blow =
      solve_riccati(scalar(0.0), scalar(1.0), scalar(0.0), scalar(q), T, M);
  const RiccatiTrajectory lyap =
      solve_riccati(scalar(a), scalar(0.0), scalar(0.0), scalar(q), T, M);
  for (int k = 0; k <= M; ++k) {
    const double t = blow.time(k);
    worst = std::max(worst,
                     std::abs(blow.at_index(k)(0, 0) - q / (1.0 + q * (T - t))));
    worst = std::max(worst, std::abs(lyap.at_index(k)(0, 0) -
                                     q * std::exp(2.0 * a * (T - t))));
  }

  const ProjectedModel pm = assemble_projected(trig_model(), trig_basis());
  const Eigen::MatrixXd reference =
      solve_riccati(pm.Abar, pm.Bbar, pm.Qbar, pm.QTbar, T, 4096).at_index(0);
  auto err = [&](int steps) {
    return (solve_riccati(pm.Abar, pm.Bbar, pm.Qbar, pm.QTbar, T, steps).at_index(0) -
            reference)
        .norm();
  };
  const double order = std::log2(err(50) / err(100));

  report("scalar Riccati closed forms and RK4 order", worst <= 1e-8 && order >= 3.5,
         "worst closed-form error " + fmt(worst) + ", observed order " +
             fmt(order));
}

// --- Criterion 4: oscillator mode decoupling --------------------------------

void criterion_mode_decoupling() {
  OscillatorModel osc;
  osc.alpha = 10.0;
  osc.beta = 1.5;
  osc.Q = Eigen::Matrix2d::Identity();
  osc.Q_T = 2.0 * Eigen::Matrix2d::Identity();
  osc.eta = 3.0;
  osc.graphon = StepGraphon(sbm_expected_weights(experiment_sbm(20, 0)));
  osc.modes = 3;
  osc.horizon = 2.0;
  const int M = 200;

  // Decoupled per-mode solves.
  const ControlLaw law = oscillator_law(osc, M);
  // Assembled 6x6 Kronecker solve in the eigenmode coordinates.
  const CouplingModel expanded = expand_oscillator(osc);
  const SubspaceBasis basis = SubspaceBasis::eigenbasis(expanded.A_g, 3);
  const ProjectedModel pm = assemble_projected(expanded, basis);
  const RiccatiTrajectory assembled =
      solve_riccati(pm.Abar, pm.Bbar, pm.Qbar, pm.QTbar, osc.horizon, M);

  double worst = 0.0;
  for (int k = 0; k <= M; ++k)
    worst = std::max(worst, (assembled.at_index(k) - law.projected.at_index(k))
                                .cwiseAbs()
                                .maxCoeff());
  report("oscillator per-mode decoupling vs 6x6 Kronecker solve", worst <= 1e-8,
         "worst entry gap " + fmt(worst));
}

// --- Criterion 5: approximate-control properties ----------------------------

void criterion_approximate() {
  // (a) zero residuals recover the exact law.
  const CouplingModel trig = trig_model();
  const SubspaceBasis tbasis = trig_basis();
  const ControlLaw exact = synthesize_exact(trig, tbasis, 200);
  const ControlLaw approx = synthesize_approximate(trig, tbasis, 200);
  double law_gap = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double t = exact.projected.time(k);
    law_gap = std::max(law_gap, (exact.projected_gain(t) - approx.projected_gain(t))
                                    .cwiseAbs()
                                    .maxCoeff());
    law_gap = std::max(law_gap, (exact.auxiliary_gain(t) - approx.auxiliary_gain(t))
                                    .cwiseAbs()
                                    .maxCoeff());
  }
  report("approximate law recovers the exact law at zero residuals",
         law_gap <= 1e-10, "worst gain gap " + fmt(law_gap));

  // (b) regenerated 120-agent instance: nonnegative, finite suboptimality.
  std::mt19937_64 rng(7177);
  CouplingModel model = trig_model();
  SbmSpec spec = experiment_sbm(40, 7);
  model.A_g = Graphon(StepGraphon(sample_sbm(spec), 1.0));
  SbmSpec bspec = spec;
  bspec.seed = spec.seed + 1;
  model.B_g = Graphon(StepGraphon(sample_sbm(bspec), 1.0));
  model.Q_g = model.A_g;
  model.QT_g = model.A_g;
  const int M = 200;
  const SubspaceBasis basis = SubspaceBasis::eigenbasis(model.A_g, 3);
  const ControlLaw law = synthesize_approximate(model, basis, M);
  const GridFunction x0 = random_grid_function(rng, 120, 1, 5.0);
  const Trajectory traj = simulate(model, law, x0, M);
  const double cost = evaluate_cost(model, traj);
  const OracleResult oracle = oracle_solve(model, x0.stacked(), M);
  const ComparisonReport cmp = compare(traj, cost, oracle.trajectory, oracle.cost);

  bool finite = std::isfinite(cost) && std::isfinite(oracle.cost);
  const bool ok = finite && cmp.cost_gap_percent >= -1e-10;
  report("sampled-network approximate control is suboptimal but finite", ok,
         "regenerated cost gap " + fmt(cmp.cost_gap_percent) +
             " % (published run: 2.376 %), max state diff " +
             fmt(100.0 * cmp.max_state_diff) + " % (published run: 11.181 %); " +
             "residual norms a=" + fmt(law.residual_norms.a) + " b=" +
             fmt(law.residual_norms.b) + " (published run: 0.058, 0.076)");
}

// --- Criterion 6: oscillator experiment pipeline -----------------------------

void criterion_oscillator_pipeline() {
  std::mt19937_64 rng(9911);
  OscillatorModel osc;
  osc.alpha = 10.0;
  osc.beta = 1.5;
  osc.Q = Eigen::Matrix2d::Identity();
  osc.Q_T = 2.0 * Eigen::Matrix2d::Identity();
  osc.eta = 3.0;
  osc.graphon = StepGraphon(sample_sbm(experiment_sbm(20, 11)), 1.0);
  osc.modes = 3;
  osc.horizon = 2.0;
  const int M = 200;

  const CouplingModel model = expand_oscillator(osc);
  const GridFunction x0 = random_grid_function(rng, 60, 2, 5.0);

  // Projection-based law from the sampled network.
  const auto t_synth = Clock::now();
  const SubspaceBasis basis = SubspaceBasis::eigenbasis(model.A_g, 3);
  const ControlLaw projection_law = synthesize_approximate(model, basis, M);
  const double wall_synth = seconds_since(t_synth);

  // Graphon law from the rank-3 block-model limit.
  OscillatorModel limit = osc;
  limit.graphon = StepGraphon(sbm_expected_weights(experiment_sbm(20, 0)));
  const ControlLaw graphon_law = oscillator_law(limit, M);

  const Trajectory proj_traj = simulate(model, projection_law, x0, M);
  const double proj_cost = evaluate_cost(model, proj_traj);
  const Trajectory graphon_traj = simulate(model, graphon_law, x0, M);
  const double graphon_cost = evaluate_cost(model, graphon_traj);

  const auto t_oracle = Clock::now();
  const OracleResult oracle = oracle_solve(model, x0.stacked(), M);
  const double wall_oracle = seconds_since(t_oracle);

  const ComparisonReport proj_cmp =
      compare(proj_traj, proj_cost, oracle.trajectory, oracle.cost);
  const ComparisonReport graphon_cmp =
      compare(graphon_traj, graphon_cost, oracle.trajectory, oracle.cost);

  const bool finite = std::isfinite(proj_cost) && std::isfinite(graphon_cost) &&
                      std::isfinite(oracle.cost);
  const bool ok = finite && proj_cmp.cost_gap_percent >= -1e-10 &&
                  graphon_cmp.cost_gap_percent >= -1e-10 &&
                  wall_synth < wall_oracle;
  report(
      "oscillator network pipeline", ok,
      "graphon-law gap " + fmt(graphon_cmp.cost_gap_percent) +
          " % (published run: 0.461 %), projection-law gap " +
          fmt(proj_cmp.cost_gap_percent) +
          " % (published run: 3.356 %), decomposed synth " + fmt(wall_synth) +
          " s vs oracle " + fmt(wall_oracle) + " s (" +
          fmt(wall_oracle / wall_synth) + "x)");
}

// --- Criterion 7: invariant suites -------------------------------------------

bool riccati_invariants() {
  const ProjectedModel pm = assemble_projected(trig_model(), trig_basis());
  const RiccatiTrajectory sol =
      solve_riccati(pm.Abar, pm.Bbar, pm.Qbar, pm.QTbar, 1.0, 200);
  const RiccatiTrajectory robust = solve_robust_auxiliary(
      trig_model(), ResidualNorms{0.058, 0.076, 0.058, 0.058}, 200);
  return sol.max_asymmetry() <= 1e-10 && sol.min_eigenvalue() >= -1e-8 &&
         robust.max_asymmetry() <= 1e-10 && robust.min_eigenvalue() >= -1e-8;
}

bool cost_split_invariant() {
  std::mt19937_64 rng(81);
  const CouplingModel model = trig_model();
  const SubspaceBasis basis = trig_basis();
  const ProjectedModel pm = assemble_projected(model, basis);
  const int N = 20, M = 40;
  Trajectory traj;
  for (int k = 0; k <= M; ++k) {
    traj.time_grid.push_back(model.horizon * k / M);
    traj.states.push_back(random_grid_function(rng, N, 1, 2.0));
    traj.controls.push_back(random_grid_function(rng, N, 1, 1.0));
  }
  const double total = evaluate_cost(model, traj);
  const double h = model.horizon / M;
  double split = 0.0;
  for (int k = 0; k <= M; ++k) {
    const double w = (k == 0 || k == M) ? 0.5 : 1.0;
    const Eigen::VectorXd xp = project_function(traj.states[k], basis);
    const Eigen::VectorXd up = project_function(traj.controls[k], basis);
    const Decomposition dx = decompose(traj.states[k], basis);
    const Decomposition du = decompose(traj.controls[k], basis);
    const GridFunction lqx(dx.auxiliary_part.values() * model.L_q.transpose());
    split += w * h * (xp.dot(pm.Qbar * xp) + up.dot(up) +
                      inner(dx.auxiliary_part, lqx) +
                      inner(du.auxiliary_part, du.auxiliary_part));
  }
  const Eigen::VectorXd xpT = project_function(traj.states[M], basis);
  const Decomposition dT = decompose(traj.states[M], basis);
  const GridFunction lqTx(dT.auxiliary_part.values() * model.L_qT.transpose());
  split += xpT.dot(pm.QTbar * xpT) + inner(dT.auxiliary_part, lqTx);
  return std::abs(total - split) <= 1e-8 * std::max(1.0, std::abs(total));
}

bool pythagoras_invariant() {
  std::mt19937_64 rng(82);
  const SubspaceBasis basis =
      SubspaceBasis::from_grid(random_orthonormal_columns(rng, 40, 2));
  for (int trial = 0; trial < 5; ++trial) {
    const GridFunction x = random_grid_function(rng, 40, 2, 5.0);
    const Decomposition d = decompose(x, basis);
    const double lhs = inner(x, x);
    const double rhs = inner(d.subspace_part, d.subspace_part) +
                       inner(d.auxiliary_part, d.auxiliary_part);
    if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, lhs)) return false;
  }
  return true;
}

bool commutation_invariant() {
  std::mt19937_64 rng(83);
  Eigen::MatrixXd phi;
  const CouplingModel model = random_rank_d_model(rng, 16, 2, 2, &phi);
  const SubspaceBasis basis = SubspaceBasis::from_grid(phi);
  if (check_invariance(model.A_g, basis) > 1e-10) return false;
  const Eigen::MatrixXd op = project_operator(model.D_a, model.A_g, basis);
  for (int trial = 0; trial < 5; ++trial) {
    const GridFunction x = random_grid_function(rng, 16, 2, 2.0);
    const GridFunction dax(model.A_g.apply(x).values() * model.D_a.transpose());
    const Eigen::VectorXd lhs = project_function(dax, basis);
    const Eigen::VectorXd rhs = op * project_function(x, basis);
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-8) return false;
  }
  return true;
}

std::vector<fs::path> csv_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool determinism_invariant(std::string* detail) {
  // Bit-exact network sampling.
  const SbmSpec spec = experiment_sbm(15, 33);
  if (sample_sbm(spec) != sample_sbm(spec)) {
    *detail = "sbm sampling not reproducible";
    return false;
  }
  // Byte-identical pipeline reruns, including the seeded-network path.
  for (const char* config : {"configs/trig_network.cfg", "configs/sbm_approx.cfg"}) {
    const fs::path base = fs::temp_directory_path() / "glqr_acceptance";
    fs::remove_all(base);
    RunOptions options;
    options.config_path = config;
    options.quiet = true;
    options.steps_override = 50;
    options.output_dir_override = (base / "a").string();
    run_experiment(options);
    options.output_dir_override = (base / "b").string();
    run_experiment(options);
    const auto a_files = csv_files(base / "a");
    const auto b_files = csv_files(base / "b");
    if (a_files.size() != b_files.size() || a_files.empty()) {
      *detail = std::string("output mismatch for ") + config;
      return false;
    }
    for (std::size_t i = 0; i < a_files.size(); ++i) {
      if (read_bytes(a_files[i]) != read_bytes(b_files[i])) {
        *detail = "rerun differs: " + a_files[i].filename().string();
        return false;
      }
    }
    fs::remove_all(base);
  }
  *detail = "sbm sampling and two pipeline reruns byte-identical";
  return true;
}

void criterion_invariants() {
  report("riccati symmetry and positive semidefiniteness", riccati_invariants(), "");
  report("cost decomposition identity on random controls", cost_split_invariant(), "");
  report("orthogonal state decomposition", pythagoras_invariant(), "");
  report("projection/operator commutation", commutation_invariant(), "");
  std::string detail;
  const bool det = determinism_invariant(&detail);
  report("pinned-seed determinism", det, detail);
}

}  // namespace

int main() {
  const auto start = Clock::now();
  criterion_oracle_equivalence();
  criterion_trig_fixtures();
  criterion_riccati();
  criterion_mode_decoupling();
  criterion_approximate();
  criterion_oscillator_pipeline();
  criterion_invariants();
  std::printf("acceptance: %s (%d failure%s, %.1f s)\n",
              failures == 0 ? "all criteria passed" : "FAILURES", failures,
              failures == 1 ? "" : "s", seconds_since(start));
  return failures == 0 ? 0 : 1;
}
