#include "glqr/control.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "glqr/errors.hpp"

namespace glqr {

Eigen::MatrixXd ControlLaw::projected_gain(double t) const {
  return Bbar.transpose() * projected.at_time(t);
}

Eigen::MatrixXd ControlLaw::auxiliary_gain(double t) const {
  return L_b.transpose() * auxiliary.at_time(t);
}

std::vector<Eigen::VectorXd> ControlLaw::precompute_projected_states(
    const Eigen::VectorXd& x0p, int steps) const {
  if (x0p.size() != static_cast<long>(state_dim) * subspace_dim)
    throw DimensionError("control law: projected initial condition has wrong length");
  if (steps < 1) throw ConstructionError("control law: steps must be >= 1");
  const double h = horizon / steps;
  auto rhs = [&](double t, const Eigen::VectorXd& xp) -> Eigen::VectorXd {
    return Abar * xp - Bbar * (Bbar.transpose() * (projected.at_time(t) * xp));
  };
  std::vector<Eigen::VectorXd> out(steps + 1);
  out[0] = x0p;
  Eigen::VectorXd x = x0p;
  for (int k = 0; k < steps; ++k) {
    const double t = horizon * k / steps;
    const Eigen::VectorXd k1 = rhs(t, x);
    const Eigen::VectorXd k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite())
      throw IntegrationError("projected closed loop became non-finite", t + h);
    out[k + 1] = x;
  }
  return out;
}

ControlLaw synthesize_exact(const CouplingModel& model, const SubspaceBasis& basis,
                            int steps) {
  // Invariance first (assemble_projected refuses on failure), then the exact
  // low-rank certificates.
  ProjectedModel pm = assemble_projected(model, basis);
  const char* names[4] = {"A", "B", "Q", "Q_T"};
  const Graphon* graphons[4] = {&model.A_g, &model.B_g, &model.Q_g, &model.QT_g};
  std::ostringstream bad;
  for (int i = 0; i < 4; ++i) {
    const double r = check_lowrank(*graphons[i], basis);
    if (r > certificate_threshold(*graphons[i])) {
      if (bad.tellp() > 0) bad << ", ";
      bad << names[i] << "=" << r;
    }
  }
  if (bad.tellp() > 0)
    throw CertificateError(
        "low-rank certificate failed (residual operator norms: " + bad.str() +
        "); use the approximate synthesis for couplings without exact low-rank "
        "structure");

  RiccatiTrajectory projected = solve_riccati(pm.Abar, pm.Bbar, pm.Qbar, pm.QTbar,
                                              model.horizon, steps);
  RiccatiTrajectory auxiliary = solve_auxiliary(model, steps);
  return ControlLaw{basis,
                    std::move(projected),
                    std::move(auxiliary),
                    std::move(pm.Abar),
                    std::move(pm.Bbar),
                    model.L_b,
                    LawMode::kExact,
                    ResidualNorms{},
                    model.horizon,
                    model.state_dim(),
                    basis.dim()};
}

ControlLaw synthesize_approximate(const CouplingModel& model,
                                  const SubspaceBasis& basis, int steps,
                                  const WarningSink& warn) {
  ProjectedModel pm = project_model(model, basis);
  ResidualNorms norms;
  norms.a = check_lowrank(model.A_g, basis);
  norms.b = check_lowrank(model.B_g, basis);
  norms.q = check_lowrank(model.Q_g, basis);
  norms.qT = check_lowrank(model.QT_g, basis);

  RiccatiTrajectory projected = solve_riccati(pm.Abar, pm.Bbar, pm.Qbar, pm.QTbar,
                                              model.horizon, steps);
  RiccatiTrajectory auxiliary = solve_robust_auxiliary(model, norms, steps, warn);
  return ControlLaw{basis,
                    std::move(projected),
                    std::move(auxiliary),
                    std::move(pm.Abar),
                    std::move(pm.Bbar),
                    model.L_b,
                    LawMode::kApproximate,
                    norms,
                    model.horizon,
                    model.state_dim(),
                    basis.dim()};
}

Eigen::VectorXd evaluate_nodal(const ControlLaw& law, double t,
                               const Eigen::VectorXd& local_state,
                               const Eigen::VectorXd& projected_state,
                               const Eigen::VectorXd& basis_values) {
  const int n = law.state_dim;
  const int d = law.subspace_dim;
  if (t < 0.0 || t > law.horizon)
    throw std::out_of_range("evaluate_nodal: time outside [0, T]");
  if (local_state.size() != n)
    throw DimensionError("evaluate_nodal: local state has wrong length");
  if (projected_state.size() != static_cast<long>(n) * d)
    throw DimensionError("evaluate_nodal: projected state has wrong length");
  if (basis_values.size() != d)
    throw DimensionError("evaluate_nodal: basis values have wrong length");

  Eigen::VectorXd aux_state = local_state;
  for (int l = 0; l < d; ++l)
    aux_state -= basis_values[l] * projected_state.segment(l * n, n);

  const Eigen::VectorXd up = -(law.projected_gain(t) * projected_state);
  Eigen::VectorXd u = -(law.auxiliary_gain(t) * aux_state);
  for (int l = 0; l < d; ++l) u += basis_values[l] * up.segment(l * n, n);
  return u;
}

void OscillatorModel::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw ConstructionError("oscillator: alpha and beta must be positive");
  if (!(horizon > 0.0))
    throw ConstructionError("oscillator: horizon must be positive");
  if (modes < 1) throw ConstructionError("oscillator: mode count must be >= 1");
  for (const Eigen::Matrix2d* W : {&Q, &Q_T}) {
    if (((*W) - W->transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ConstructionError("oscillator: Q and Q_T must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(*W, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12)
      throw ConstructionError("oscillator: Q and Q_T must be positive semidefinite");
  }
}

CouplingModel expand_oscillator(const OscillatorModel& model) {
  model.validate();
  const int N = model.graphon.partition_size();
  CouplingModel out;
  out.L_a = Eigen::Matrix2d{{0.0, model.alpha}, {-model.alpha, 0.0}};
  out.D_a = Eigen::Matrix2d::Identity();
  out.L_b = Eigen::Matrix2d{{0.0, 0.0}, {0.0, model.beta}};
  out.D_b = Eigen::Matrix2d::Zero();
  out.L_q = model.Q;
  out.D_q = model.Q;
  out.L_qT = model.Q_T;
  out.D_qT = model.Q_T;
  out.A_g = Graphon(model.graphon);
  out.B_g = Graphon(StepGraphon::zero(N));
  // Derived cost kernel K = eta^2 A^2 - 2 eta A, so that
  // Q I + Q K = (I - eta A) Q (I - eta A). Kernel composition of step
  // graphons is W*W/N.
  const Eigen::MatrixXd& W = model.graphon.weights();
  Eigen::MatrixXd K =
      model.eta * model.eta * (W * W) / N - 2.0 * model.eta * W;
  K = 0.5 * (K + K.transpose()).eval();
  out.Q_g = Graphon(StepGraphon(K));
  out.QT_g = Graphon(StepGraphon(std::move(K)));
  out.horizon = model.horizon;
  return out;
}

ControlLaw oscillator_law(const OscillatorModel& model, int steps) {
  model.validate();
  const CouplingModel expanded = expand_oscillator(model);
  const int d = model.modes;
  const Graphon coupling(model.graphon);

  SpectralDecomposition spec = coupling.spectral_decomposition(d);
  const double scale = std::max(1.0, coupling.operator_norm());
  for (int l = 0; l < d; ++l)
    if (std::abs(spec.eigenvalues[l]) <= 1e-12 * scale)
      throw std::out_of_range("oscillator: mode count exceeds the graphon rank");
  SubspaceBasis basis = SubspaceBasis::from_functions(std::move(spec.eigenfunctions));

  const Eigen::MatrixXd& L_a = expanded.L_a;
  const Eigen::MatrixXd& L_b = expanded.L_b;
  const Eigen::Matrix2d I2 = Eigen::Matrix2d::Identity();

  std::vector<RiccatiTrajectory> modes;
  modes.reserve(d);
  for (int l = 0; l < d; ++l) {
    const double lambda = spec.eigenvalues[l];
    const double w = (1.0 - model.eta * lambda) * (1.0 - model.eta * lambda);
    modes.push_back(solve_riccati(L_a + lambda * I2, L_b, w * model.Q,
                                  w * model.Q_T, model.horizon, steps));
  }
  RiccatiTrajectory auxiliary =
      solve_riccati(L_a, L_b, model.Q, model.Q_T, model.horizon, steps);

  // Block assembly over modes; with the eigenbasis the projected problem is
  // block-diagonal in the mode-major layout.
  std::vector<Eigen::MatrixXd> assembled(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    for (int l = 0; l < d; ++l)
      P.block(2 * l, 2 * l, 2, 2) = modes[l].at_index(k);
    assembled[k] = std::move(P);
  }

  Eigen::MatrixXd Abar = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  for (int l = 0; l < d; ++l)
    Abar.block(2 * l, 2 * l, 2, 2) = L_a + spec.eigenvalues[l] * I2;
  Eigen::MatrixXd Bbar = kron(Eigen::MatrixXd::Identity(d, d), L_b);

  ResidualNorms norms;
  norms.a = check_lowrank(expanded.A_g, basis);
  norms.b = 0.0;
  norms.q = check_lowrank(expanded.Q_g, basis);
  norms.qT = norms.q;
  const bool exact = norms.a <= certificate_threshold(expanded.A_g) &&
                     norms.q <= certificate_threshold(expanded.Q_g);

  return ControlLaw{std::move(basis),
                    RiccatiTrajectory(model.horizon, std::move(assembled)),
                    std::move(auxiliary),
                    std::move(Abar),
                    std::move(Bbar),
                    L_b,
                    exact ? LawMode::kExact : LawMode::kApproximate,
                    norms,
                    model.horizon,
                    2,
                    d};
}

CouplingModel rescale_control_weight(const CouplingModel& model, double r) {
  if (!(r > 0.0))
    throw ConstructionError("control weight: scalar penalty must be positive");
  CouplingModel out = model;
  const double s = 1.0 / std::sqrt(r);
  out.L_b = s * model.L_b;
  out.D_b = s * model.D_b;
  return out;
}

}  // namespace glqr
