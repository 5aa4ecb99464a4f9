#pragma once

#include <Eigen/Dense>
#include <vector>

#include "glqr/control.hpp"
#include "glqr/riccati.hpp"

namespace glqr {

// Time-gridded closed-loop record: states and controls as grid functions.
struct Trajectory {
  std::vector<double> time_grid;       // M+1 points
  std::vector<GridFunction> states;    // M+1
  std::vector<GridFunction> controls;  // M+1
};

// Forward RK4 of dx = [L_a I + D_a A] x + [L_b I + D_b B] u with u supplied by
// the law (Riccati schedules interpolated linearly in time). Controls are
// recorded at the grid times.
Trajectory simulate(const CouplingModel& model, const ControlLaw& law,
                    const GridFunction& x0, int steps);

// Open-loop variant: u(t) interpolates linearly between the given grid
// controls (sized steps+1, matching the uniform grid on [0, horizon]).
Trajectory simulate_controls(const CouplingModel& model,
                             const std::vector<GridFunction>& controls,
                             const GridFunction& x0);

// Trapezoidal quadrature of <x, Q x> + <u, u> plus the terminal term, all in
// the grid inner product.
double evaluate_cost(const CouplingModel& model, const Trajectory& traj);

// Samples every dictionary coupling onto the uniform N-partition so the model
// can be handled by the direct solver.
CouplingModel discretize_model(const CouplingModel& model, int grid_size);

struct OracleResult {
  Trajectory trajectory;
  double cost = 0.0;
};

// Direct centralized solve: assembles the full nN x nN matrices (L_a on the
// diagonal blocks plus D_a w_ij / N couplings, analogously for B, Q, Q_T),
// solves the nN x nN Riccati equation and forward-simulates the optimal
// closed loop. x0 is the stacked vector [x^1; ...; x^N]. Refuses above the
// desk-scale cap.
OracleResult oracle_solve(const CouplingModel& model, const Eigen::VectorXd& x0,
                          int steps, int size_cap = 512);

struct ComparisonReport {
  double state_diff_l2 = 0.0;    // relative L2([0,T]) norm of the state gap
  double max_state_diff = 0.0;   // max-norm gap relative to the peak of b
  double cost_a = 0.0;
  double cost_b = 0.0;
  double cost_gap_percent = 0.0;  // 100 (cost_a - cost_b) / cost_b
  double wall_a = 0.0;            // seconds, captured by the caller
  double wall_b = 0.0;
};

ComparisonReport compare(const Trajectory& a, double cost_a, const Trajectory& b,
                         double cost_b);

}  // namespace glqr
