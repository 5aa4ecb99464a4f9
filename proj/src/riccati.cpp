#include "glqr/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "glqr/errors.hpp"

namespace glqr {

namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kPsdTolerance = -1e-8;

void require_square(const Eigen::MatrixXd& m, const char* name, int dim) {
  if (m.rows() != dim || m.cols() != dim)
    throw DimensionError(std::string("riccati: ") + name + " has wrong shape");
}

void require_symmetric_psd(const Eigen::MatrixXd& m, const char* name) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance)
    throw ConstructionError(std::string("riccati: ") + name + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kPsdTolerance)
    throw ConstructionError(std::string("riccati: ") + name +
                            " is not positive semidefinite (min eigenvalue " +
                            std::to_string(es.eigenvalues().minCoeff()) + ")");
}

// -dP/dt = A'P + PA - P S P + Q backward from P(T) = QT. Integrates in the
// reversed time s = T - t, where dP/ds equals the right-hand side above.
std::vector<Eigen::MatrixXd> integrate_backward(const Eigen::MatrixXd& A,
                                                const Eigen::MatrixXd& S,
                                                const Eigen::MatrixXd& Q,
                                                const Eigen::MatrixXd& QT,
                                                double horizon, int steps) {
  const double h = horizon / steps;
  auto rhs = [&](const Eigen::MatrixXd& P) -> Eigen::MatrixXd {
    return A.transpose() * P + P * A - P * S * P + Q;
  };
  std::vector<Eigen::MatrixXd> out(steps + 1);
  out[steps] = QT;
  Eigen::MatrixXd P = QT;
  for (int k = steps; k > 0; --k) {
    const Eigen::MatrixXd k1 = rhs(P);
    const Eigen::MatrixXd k2 = rhs(P + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = rhs(P + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = rhs(P + h * k3);
    P += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    P = 0.5 * (P + P.transpose()).eval();
    const double t = horizon * (k - 1) / steps;
    if (!P.allFinite())
      throw IntegrationError("riccati: solution became non-finite at t = " +
                                 std::to_string(t),
                             t);
    out[k - 1] = P;
  }
  return out;
}

}  // namespace

double certificate_threshold(const Graphon& g) {
  return kCertificateTolerance * std::max(1.0, g.operator_norm());
}

void CouplingModel::validate() const {
  const int n = state_dim();
  if (n < 1) throw DimensionError("model: state dimension must be >= 1");
  require_square(L_a, "L_a", n);
  require_square(D_a, "D_a", n);
  require_square(L_b, "L_b", n);
  require_square(D_b, "D_b", n);
  require_square(L_q, "L_q", n);
  require_square(D_q, "D_q", n);
  require_square(L_qT, "L_qT", n);
  require_square(D_qT, "D_qT", n);
  if (!(horizon > 0.0)) throw ConstructionError("model: horizon must be positive");
  const int N = A_g.native_grid();
  for (const Graphon* g : {&B_g, &Q_g, &QT_g}) {
    const int Ng = g->native_grid();
    if (N > 0 && Ng > 0 && Ng != N)
      throw DimensionError("model: step graphons live on different grids");
  }
}

RiccatiTrajectory::RiccatiTrajectory(double horizon,
                                     std::vector<Eigen::MatrixXd> matrices)
    : horizon_(horizon), matrices_(std::move(matrices)) {
  if (matrices_.size() < 2)
    throw DimensionError("riccati trajectory: needs at least two grid points");
  if (!(horizon_ > 0.0))
    throw ConstructionError("riccati trajectory: horizon must be positive");
}

Eigen::MatrixXd RiccatiTrajectory::at_time(double t) const {
  const double slack = 1e-9 * horizon_;
  if (t < -slack || t > horizon_ + slack)
    throw std::out_of_range("riccati trajectory: time outside [0, T]");
  t = std::clamp(t, 0.0, horizon_);
  const int M = steps();
  const double u = t / horizon_ * M;
  const int k = std::min(static_cast<int>(u), M - 1);
  const double theta = u - k;
  return (1.0 - theta) * matrices_[k] + theta * matrices_[k + 1];
}

double RiccatiTrajectory::min_eigenvalue() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const Eigen::MatrixXd& m : matrices_) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    worst = std::min(worst, es.eigenvalues().minCoeff());
  }
  return worst;
}

double RiccatiTrajectory::max_asymmetry() const {
  double worst = 0.0;
  for (const Eigen::MatrixXd& m : matrices_)
    worst = std::max(worst, (m - m.transpose()).cwiseAbs().maxCoeff());
  return worst;
}

ProjectedModel project_model(const CouplingModel& model, const SubspaceBasis& basis) {
  model.validate();
  const int n = model.state_dim();
  const int d = basis.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  ProjectedModel out;
  out.state_dim = n;
  out.subspace_dim = d;
  out.Abar = kron(I, model.L_a) +
             kron(coupling_projection(model.A_g, basis), model.D_a);
  out.Bbar = kron(I, model.L_b) +
             kron(coupling_projection(model.B_g, basis), model.D_b);
  out.Qbar = kron(I, model.L_q) +
             kron(coupling_projection(model.Q_g, basis), model.D_q);
  out.QTbar = kron(I, model.L_qT) +
              kron(coupling_projection(model.QT_g, basis), model.D_qT);
  out.Qbar = 0.5 * (out.Qbar + out.Qbar.transpose()).eval();
  out.QTbar = 0.5 * (out.QTbar + out.QTbar.transpose()).eval();
  return out;
}

ProjectedModel assemble_projected(const CouplingModel& model,
                                  const SubspaceBasis& basis) {
  model.validate();
  const char* names[4] = {"A", "B", "Q", "Q_T"};
  const Graphon* graphons[4] = {&model.A_g, &model.B_g, &model.Q_g, &model.QT_g};
  std::ostringstream bad;
  for (int i = 0; i < 4; ++i) {
    const double r = check_invariance(*graphons[i], basis);
    if (r > certificate_threshold(*graphons[i])) {
      if (bad.tellp() > 0) bad << ", ";
      bad << names[i] << "=" << r;
    }
  }
  if (bad.tellp() > 0)
    throw CertificateError(
        "invariance certificate failed (max residual per operator: " + bad.str() +
        ")");
  return project_model(model, basis);
}

RiccatiTrajectory solve_riccati(const Eigen::MatrixXd& Abar,
                                const Eigen::MatrixXd& Bbar,
                                const Eigen::MatrixXd& Qbar,
                                const Eigen::MatrixXd& QTbar, double horizon,
                                int steps) {
  const int m = static_cast<int>(Abar.rows());
  require_square(Abar, "Abar", m);
  require_square(Bbar, "Bbar", m);
  require_square(Qbar, "Qbar", m);
  require_square(QTbar, "QTbar", m);
  if (steps < 1) throw ConstructionError("riccati: steps must be >= 1");
  if (!(horizon > 0.0)) throw ConstructionError("riccati: horizon must be positive");
  require_symmetric_psd(Qbar, "Qbar");
  require_symmetric_psd(QTbar, "QTbar");
  return RiccatiTrajectory(
      horizon, integrate_backward(Abar, Bbar * Bbar.transpose(), Qbar, QTbar,
                                  horizon, steps));
}

RiccatiTrajectory solve_auxiliary(const CouplingModel& model, int steps) {
  model.validate();
  return solve_riccati(model.L_a, model.L_b, model.L_q, model.L_qT, model.horizon,
                       steps);
}

RiccatiTrajectory solve_robust_auxiliary(const CouplingModel& model,
                                         const ResidualNorms& norms, int steps,
                                         const WarningSink& warn) {
  model.validate();
  if (steps < 1) throw ConstructionError("riccati: steps must be >= 1");
  if (norms.a < 0 || norms.b < 0 || norms.q < 0 || norms.qT < 0)
    throw ConstructionError("riccati: residual norms must be nonnegative");

  auto emit = [&](const std::string& msg) {
    if (warn) warn(msg);
  };
  // Applicability conditions of the inflated design; violations are reported
  // but the equation is integrated as printed.
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (model.D_qT + model.D_qT.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
      emit("robust auxiliary: D_qT is not positive definite");
  }
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (model.D_q + model.D_q.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12)
      emit("robust auxiliary: D_q is not positive semidefinite");
  }
  {
    const Eigen::MatrixXd DbLb = model.D_b * model.L_b.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (DbLb + DbLb.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12)
      emit("robust auxiliary: D_b L_b' is not positive semidefinite");
  }
  {
    Eigen::EigenSolver<Eigen::MatrixXd> es(model.D_a);
    if (es.eigenvalues().real().minCoeff() < -1e-12)
      emit("robust auxiliary: D_a has eigenvalues with negative real part");
  }

  const Eigen::MatrixXd drift = model.L_a + model.D_a * norms.a;
  const Eigen::MatrixXd quad = model.L_b.transpose() * model.L_b -
                               model.D_b * model.L_b.transpose() * norms.b -
                               model.L_b * model.D_b.transpose() * norms.b;
  const Eigen::MatrixXd weight = model.L_q + model.D_q * norms.q;
  const Eigen::MatrixXd terminal = model.L_qT + model.D_qT * norms.qT;
  return RiccatiTrajectory(model.horizon,
                           integrate_backward(drift, quad, weight, terminal,
                                              model.horizon, steps));
}

}  // namespace glqr
