#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "glqr/riccati.hpp"
#include "glqr/sim.hpp"

namespace glqr {

// Comma-separated reals, one matrix row per line. Readers are strict: ragged
// rows or unparsable fields are errors. Writers round-trip doubles ("%.17g"),
// so identical data produces byte-identical files.
Eigen::MatrixXd read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

// One row per time point: t, then the grid function flattened agent-major.
void write_trajectory_csv(const std::string& path,
                          const std::vector<double>& time_grid,
                          const std::vector<GridFunction>& values);
struct TrajectoryData {
  std::vector<double> time_grid;
  std::vector<GridFunction> values;  // flattened columns rehydrated with dim
};
TrajectoryData read_trajectory_csv(const std::string& path, int dim);

// One row per time point, the matrix flattened row-major.
void write_riccati_csv(const std::string& path, const RiccatiTrajectory& traj);

// Generic schedule export (gain matrices per time step), same layout.
void write_matrix_series_csv(const std::string& path,
                             const std::vector<Eigen::MatrixXd>& series);

std::string format_double(double v);

}  // namespace glqr
