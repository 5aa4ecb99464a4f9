#pragma once

#include <Eigen/Dense>
#include <vector>

#include "glqr/riccati.hpp"
#include "glqr/subspace.hpp"

namespace glqr {

enum class LawMode { kExact, kApproximate };

// Synthesized feedback: projected gain schedule on R^{nd} plus the decoupled
// auxiliary gain schedule on R^n. At time t,
//   u^p        = -Bbar' Pi(t) x^p,
//   u_perp(g)  = -L_b' pi(t) x_perp(g)  per agent g,
// combined as u = u_perp + sum_l u^{pl} f_l.
struct ControlLaw {
  SubspaceBasis basis;
  RiccatiTrajectory projected;  // nd x nd, Pi
  RiccatiTrajectory auxiliary;  // n x n, pi
  Eigen::MatrixXd Abar, Bbar;   // nd x nd
  Eigen::MatrixXd L_b;          // n x n
  LawMode mode = LawMode::kExact;
  ResidualNorms residual_norms;
  double horizon = 0.0;
  int state_dim = 0;
  int subspace_dim = 0;

  Eigen::MatrixXd projected_gain(double t) const;  // Bbar' Pi(t)
  Eigen::MatrixXd auxiliary_gain(double t) const;  // L_b' pi(t)

  // Closed-loop projected states x^p(t_k) on the uniform time grid, forward
  // RK4 of dx^p = (Abar - Bbar Bbar' Pi(t)) x^p. Agents can evaluate their
  // nodal control from this broadcast schedule without exchanging raw states.
  std::vector<Eigen::VectorXd> precompute_projected_states(
      const Eigen::VectorXd& x0p, int steps) const;
};

// Exact optimal law. Requires the invariance and low-rank certificates for all
// four couplings; refuses otherwise, pointing at the approximate path.
ControlLaw synthesize_exact(const CouplingModel& model, const SubspaceBasis& basis,
                            int steps);

// Approximate law: the projected gain of the exact design plus the auxiliary
// gain from the residual-inflated equation. Residual norms are computed
// internally. Recovers the exact law when the residuals vanish.
ControlLaw synthesize_approximate(const CouplingModel& model,
                                  const SubspaceBasis& basis, int steps,
                                  const WarningSink& warn = {});

// Per-agent slice of the law: from the agent's own state and the broadcast
// projected state, u(g) = -L_b' pi(t) x_perp(g) + sum_l u^{pl} f_l(g) with
// x_perp(g) = local_state - sum_l x^{pl} f_l(g).
Eigen::VectorXd evaluate_nodal(const ControlLaw& law, double t,
                               const Eigen::VectorXd& local_state,
                               const Eigen::VectorXd& projected_state,
                               const Eigen::VectorXd& basis_values);

// Network of planar harmonic oscillators with state-coupled tracking cost
// (x - eta z)' Q (x - eta z), z the network average coupling.
struct OscillatorModel {
  double alpha = 1.0;  // natural frequency
  double beta = 1.0;   // input gain on the second state component
  Eigen::Matrix2d Q = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d Q_T = Eigen::Matrix2d::Identity();
  double eta = 0.0;  // tracking coefficient
  StepGraphon graphon = StepGraphon::zero(1);
  int modes = 1;  // d
  double horizon = 1.0;

  void validate() const;
};

// Maps the oscillator tracking cost into the coupling-model form: the state
// cost operator (I - eta A) Q (I - eta A) expands as Q I + Q K with the
// derived kernel K = eta^2 A^2 - 2 eta A, so the projected weight of mode l is
// (1 - eta lambda_l)^2 Q and the auxiliary weight is Q.
CouplingModel expand_oscillator(const OscillatorModel& model);

// Direct per-mode synthesis: d decoupled 2x2 Riccati equations
//   -dPi^l/dt = (L_a + lambda_l I)' Pi^l + Pi^l (L_a + lambda_l I)
//               - Pi^l L_b L_b' Pi^l + (1 - eta lambda_l)^2 Q
// plus the auxiliary 2x2 equation, packaged with the eigenbasis so the
// projected Riccati is the block assembly over modes.
ControlLaw oscillator_law(const OscillatorModel& model, int steps);

// Rescales a model posed with control penalty r <u, u> (r > 0) into the
// unit-penalty form solved here: L_b and D_b scale by 1/sqrt(r); controls of
// the rescaled problem are sqrt(r) times the original ones.
CouplingModel rescale_control_weight(const CouplingModel& model, double r);

}  // namespace glqr
