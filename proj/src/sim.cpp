#include "glqr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "glqr/errors.hpp"

namespace glqr {

namespace {

// Row-wise application of [L I + D G] to a grid function: row i becomes
// L x_i + D (G x)_i.
Eigen::MatrixXd coupled_apply(const Eigen::MatrixXd& L, const Eigen::MatrixXd& D,
                              const Graphon& g, const GridFunction& x) {
  Eigen::MatrixXd out = x.values() * L.transpose();
  if (!D.isZero(0.0)) out += g.apply(x).values() * D.transpose();
  return out;
}

using ControlField = std::function<GridFunction(double, const GridFunction&)>;

Trajectory integrate_closed_loop(const CouplingModel& model,
                                 const ControlField& control,
                                 const GridFunction& x0, int steps) {
  if (steps < 1) throw ConstructionError("simulate: steps must be >= 1");
  const double T = model.horizon;
  const double h = T / steps;

  auto rhs = [&](double t, const GridFunction& x) -> Eigen::MatrixXd {
    const GridFunction u = control(t, x);
    return coupled_apply(model.L_a, model.D_a, model.A_g, x) +
           coupled_apply(model.L_b, model.D_b, model.B_g, u);
  };

  Trajectory traj;
  traj.time_grid.resize(steps + 1);
  traj.states.reserve(steps + 1);
  traj.controls.reserve(steps + 1);

  GridFunction x = x0;
  for (int k = 0; k <= steps; ++k) {
    const double t = T * k / steps;
    traj.time_grid[k] = t;
    traj.states.push_back(x);
    traj.controls.push_back(control(t, x));
    if (k == steps) break;
    const Eigen::MatrixXd k1 = rhs(t, x);
    const Eigen::MatrixXd k2 = rhs(t + 0.5 * h, GridFunction(x.values() + 0.5 * h * k1));
    const Eigen::MatrixXd k3 = rhs(t + 0.5 * h, GridFunction(x.values() + 0.5 * h * k2));
    const Eigen::MatrixXd k4 = rhs(t + h, GridFunction(x.values() + h * k3));
    x.values() += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.values().allFinite())
      throw IntegrationError("simulate: state became non-finite at t = " +
                                 std::to_string(t + h),
                             t + h);
  }
  return traj;
}

int model_grid_size(const CouplingModel& model, const GridFunction& x0) {
  const int N = x0.grid_size();
  const int Ng = model.A_g.native_grid();
  if (Ng > 0 && Ng != N)
    throw DimensionError("simulate: initial state grid does not match the coupling grid");
  return N;
}

}  // namespace

Trajectory simulate(const CouplingModel& model, const ControlLaw& law,
                    const GridFunction& x0, int steps) {
  model.validate();
  const int N = model_grid_size(model, x0);
  const int n = model.state_dim();
  if (x0.dim() != n) throw DimensionError("simulate: initial state dimension mismatch");
  if (std::abs(law.horizon - model.horizon) > 1e-12 * std::max(1.0, model.horizon))
    throw DimensionError("simulate: law horizon does not match the model horizon");
  if (law.state_dim != n) throw DimensionError("simulate: law state dimension mismatch");

  const Eigen::MatrixXd phi = law.basis.sample(N);
  const int d = law.subspace_dim;

  ControlField control = [&model, &law, phi, N, n, d](
                             double t, const GridFunction& x) -> GridFunction {
    // Split the state, evaluate both gain schedules, recombine.
    const Eigen::MatrixXd coords = (phi.transpose() * x.values()) / N;  // d x n
    Eigen::VectorXd xp(static_cast<long>(n) * d);
    for (int l = 0; l < d; ++l) xp.segment(l * n, n) = coords.row(l).transpose();

    const Eigen::VectorXd up = -(law.projected_gain(t) * xp);
    Eigen::MatrixXd up_rows(d, n);
    for (int l = 0; l < d; ++l) up_rows.row(l) = up.segment(l * n, n).transpose();

    const Eigen::MatrixXd x_aux = x.values() - phi * coords;
    const Eigen::MatrixXd u_aux = -(x_aux * law.auxiliary_gain(t).transpose());
    return GridFunction(phi * up_rows + u_aux);
  };
  return integrate_closed_loop(model, control, x0, steps);
}

Trajectory simulate_controls(const CouplingModel& model,
                             const std::vector<GridFunction>& controls,
                             const GridFunction& x0) {
  model.validate();
  model_grid_size(model, x0);
  if (controls.size() < 2)
    throw DimensionError("simulate: need at least two control grid points");
  const int steps = static_cast<int>(controls.size()) - 1;
  const double T = model.horizon;

  ControlField control = [&controls, steps, T](double t,
                                               const GridFunction&) -> GridFunction {
    const double u = std::clamp(t / T * steps, 0.0, static_cast<double>(steps));
    const int k = std::min(static_cast<int>(u), steps - 1);
    const double theta = u - k;
    return GridFunction((1.0 - theta) * controls[k].values() +
                        theta * controls[k + 1].values());
  };
  return integrate_closed_loop(model, control, x0, steps);
}

double evaluate_cost(const CouplingModel& model, const Trajectory& traj) {
  model.validate();
  const int M = static_cast<int>(traj.time_grid.size()) - 1;
  if (M < 1 || traj.states.size() != traj.time_grid.size() ||
      traj.controls.size() != traj.time_grid.size())
    throw DimensionError("cost: inconsistent trajectory");
  const double h = model.horizon / M;

  auto state_weight = [&](const GridFunction& x) {
    return GridFunction(coupled_apply(model.L_q, model.D_q, model.Q_g, x));
  };
  double acc = 0.0;
  for (int k = 0; k <= M; ++k) {
    const double w = (k == 0 || k == M) ? 0.5 : 1.0;
    const GridFunction& x = traj.states[k];
    const GridFunction& u = traj.controls[k];
    acc += w * h * (inner(x, state_weight(x)) + inner(u, u));
  }
  const GridFunction& xT = traj.states[M];
  const GridFunction qT(coupled_apply(model.L_qT, model.D_qT, model.QT_g, xT));
  return acc + inner(xT, qT);
}

CouplingModel discretize_model(const CouplingModel& model, int grid_size) {
  CouplingModel out = model;
  out.A_g = Graphon(model.A_g.to_step(grid_size));
  out.B_g = Graphon(model.B_g.to_step(grid_size));
  out.Q_g = Graphon(model.Q_g.to_step(grid_size));
  out.QT_g = Graphon(model.QT_g.to_step(grid_size));
  return out;
}

OracleResult oracle_solve(const CouplingModel& model, const Eigen::VectorXd& x0,
                          int steps, int size_cap) {
  model.validate();
  const int n = model.state_dim();
  if (!model.A_g.is_step() || !model.B_g.is_step() || !model.Q_g.is_step() ||
      !model.QT_g.is_step())
    throw DimensionError(
        "oracle: requires step-graphon couplings; discretize the model first");
  const int N = model.A_g.native_grid();
  const long nN = static_cast<long>(n) * N;
  if (x0.size() != nN) throw DimensionError("oracle: x0 must have length n*N");
  if (nN > size_cap)
    throw std::invalid_argument(
        "oracle: problem size n*N = " + std::to_string(nN) +
        " exceeds the desk-scale cap " + std::to_string(size_cap) +
        "; raise size_cap to force a direct solve of this size");

  const Eigen::MatrixXd I_N = Eigen::MatrixXd::Identity(N, N);
  auto full = [&](const Eigen::MatrixXd& L, const Eigen::MatrixXd& D,
                  const Graphon& g) -> Eigen::MatrixXd {
    return kron(I_N, L) + kron(g.step().weights() / N, D);
  };
  const Eigen::MatrixXd A = full(model.L_a, model.D_a, model.A_g);
  const Eigen::MatrixXd B = full(model.L_b, model.D_b, model.B_g);
  Eigen::MatrixXd Q = full(model.L_q, model.D_q, model.Q_g);
  Eigen::MatrixXd QT = full(model.L_qT, model.D_qT, model.QT_g);
  Q = 0.5 * (Q + Q.transpose()).eval();
  QT = 0.5 * (QT + QT.transpose()).eval();

  // TODO: checkpoint the backward sweep instead of storing every nN x nN
  // matrix; at the size cap with 200 steps this holds ~400 MB.
  const RiccatiTrajectory P = solve_riccati(A, B, Q, QT, model.horizon, steps);

  ControlField control = [&B, &P, n, N](double t, const GridFunction& x) {
    const Eigen::VectorXd u = -(B.transpose() * (P.at_time(t) * x.stacked()));
    return GridFunction::from_stacked(u, N, n);
  };
  OracleResult out;
  out.trajectory = integrate_closed_loop(
      model, control, GridFunction::from_stacked(x0, N, n), steps);
  out.cost = evaluate_cost(model, out.trajectory);
  return out;
}

ComparisonReport compare(const Trajectory& a, double cost_a, const Trajectory& b,
                         double cost_b) {
  if (a.time_grid.size() != b.time_grid.size())
    throw DimensionError("compare: trajectories use different time grids");
  const int M = static_cast<int>(a.time_grid.size()) - 1;
  if (M < 1) throw DimensionError("compare: empty trajectories");
  for (int k = 0; k <= M; ++k) {
    if (std::abs(a.time_grid[k] - b.time_grid[k]) > 1e-12)
      throw DimensionError("compare: trajectories use different time grids");
    if (a.states[k].grid_size() != b.states[k].grid_size() ||
        a.states[k].dim() != b.states[k].dim())
      throw DimensionError("compare: state grids differ");
  }
  const double h = (a.time_grid[M] - a.time_grid[0]) / M;

  double num = 0.0, den = 0.0, max_diff = 0.0, max_ref = 0.0;
  for (int k = 0; k <= M; ++k) {
    const double w = (k == 0 || k == M) ? 0.5 : 1.0;
    const GridFunction diff = a.states[k] - b.states[k];
    num += w * h * inner(diff, diff);
    den += w * h * inner(b.states[k], b.states[k]);
    max_diff = std::max(max_diff, diff.values().cwiseAbs().maxCoeff());
    max_ref = std::max(max_ref, b.states[k].values().cwiseAbs().maxCoeff());
  }
  ComparisonReport report;
  report.state_diff_l2 = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  report.max_state_diff = max_ref > 0.0 ? max_diff / max_ref : max_diff;
  report.cost_a = cost_a;
  report.cost_b = cost_b;
  report.cost_gap_percent = cost_b != 0.0 ? 100.0 * (cost_a - cost_b) / cost_b : 0.0;
  return report;
}

}  // namespace glqr
