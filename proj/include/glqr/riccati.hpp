#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "glqr/graphon.hpp"
#include "glqr/subspace.hpp"

namespace glqr {

// Certificate threshold, relative to the operator norm (with a floor of 1 so
// small-norm kernels keep an absolute tolerance). Kept an order below the
// integration error so certificates never mask solver error.
inline constexpr double kCertificateTolerance = 1e-8;
double certificate_threshold(const Graphon& g);

// Local parameter matrices and the four coupling kernels of a network LQR
// problem on [0, horizon]:
//   dynamics  dx = [L_a I + D_a A] x + [L_b I + D_b B] u
//   cost      J  = int <x, [L_q I + D_q Q] x> + <u, u> dt
//                  + <x_T, [L_qT I + D_qT Q_T] x_T>.
struct CouplingModel {
  Eigen::MatrixXd L_a, D_a, L_b, D_b, L_q, D_q, L_qT, D_qT;  // n x n
  Graphon A_g, B_g, Q_g, QT_g;
  double horizon = 1.0;

  int state_dim() const { return static_cast<int>(L_a.rows()); }
  void validate() const;
};

// Kronecker assembly of the projected nd x nd problem.
struct ProjectedModel {
  Eigen::MatrixXd Abar, Bbar, Qbar, QTbar;
  int state_dim = 0;
  int subspace_dim = 0;
};

// Time-gridded solution of a matrix Riccati differential equation, integrated
// backward from the terminal condition. Index k holds Pi(t_k), t_k = k T / M;
// values between grid points interpolate linearly.
class RiccatiTrajectory {
 public:
  RiccatiTrajectory(double horizon, std::vector<Eigen::MatrixXd> matrices);

  double horizon() const { return horizon_; }
  int steps() const { return static_cast<int>(matrices_.size()) - 1; }
  int matrix_dim() const { return static_cast<int>(matrices_.front().rows()); }
  double time(int k) const { return horizon_ * k / steps(); }

  const Eigen::MatrixXd& at_index(int k) const { return matrices_.at(k); }
  Eigen::MatrixXd at_time(double t) const;
  const std::vector<Eigen::MatrixXd>& matrices() const { return matrices_; }

  // Diagnostics over all grid points.
  double min_eigenvalue() const;
  double max_asymmetry() const;

 private:
  double horizon_;
  std::vector<Eigen::MatrixXd> matrices_;
};

// Kronecker assembly without certificates. assemble_projected() additionally
// certifies that the basis span is invariant for all four couplings and
// refuses with per-operator residuals otherwise.
ProjectedModel project_model(const CouplingModel& model, const SubspaceBasis& basis);
ProjectedModel assemble_projected(const CouplingModel& model,
                                  const SubspaceBasis& basis);

// Backward classical RK4 solution of
//   -dPi/dt = Abar' Pi + Pi Abar - Pi Bbar Bbar' Pi + Qbar,  Pi(T) = QTbar
// at uniform step T/steps with explicit symmetrization after each step.
RiccatiTrajectory solve_riccati(const Eigen::MatrixXd& Abar,
                                const Eigen::MatrixXd& Bbar,
                                const Eigen::MatrixXd& Qbar,
                                const Eigen::MatrixXd& QTbar, double horizon,
                                int steps);

// The decoupled n x n problem on the orthogonal complement:
//   -dpi/dt = L_a' pi + pi L_a - pi L_b L_b' pi + L_q,  pi(T) = L_qT.
RiccatiTrajectory solve_auxiliary(const CouplingModel& model, int steps);

// Operator norms of the residual couplings A, B, Q, Q_T outside the subspace.
struct ResidualNorms {
  double a = 0.0, b = 0.0, q = 0.0, qT = 0.0;
};

using WarningSink = std::function<void(const std::string&)>;

// Auxiliary equation inflated by the residual operator norms, with drift
// L_a + D_a |A_perp|, quadratic coefficient
// L_b' L_b - D_b L_b' |B_perp| - L_b D_b' |B_perp| (as printed), state weight
// L_q + D_q |Q_perp| and terminal L_qT + D_qT |QT_perp|. The applicability
// sign conditions are checked and reported through `warn`, not enforced.
RiccatiTrajectory solve_robust_auxiliary(const CouplingModel& model,
                                         const ResidualNorms& norms, int steps,
                                         const WarningSink& warn = {});

}  // namespace glqr
