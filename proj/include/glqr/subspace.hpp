#pragma once

#include <Eigen/Dense>
#include <vector>

#include "glqr/graphon.hpp"
#include "glqr/grid_function.hpp"

namespace glqr {

// Orthonormal basis f_1..f_d of a candidate common invariant subspace of the
// coupling operators. Bases are homogeneous: all grid-backed (on one N) or all
// trigonometric combinations.
class SubspaceBasis {
 public:
  // Re-orthonormalizes the columns by modified Gram-Schmidt in the grid inner
  // product; a pivot norm below 1e-8 is a rank-deficiency error.
  static SubspaceBasis from_grid(const Eigen::MatrixXd& columns);

  // Accepts functions that are already orthonormal (Gram within 1e-8 of the
  // identity); eigenfunctions and dictionary elements qualify.
  static SubspaceBasis from_functions(std::vector<BasisFunction> functions);

  static SubspaceBasis from_trig(const std::vector<TrigCombo>& combos);

  // Top-d eigenfunctions of g.
  static SubspaceBasis eigenbasis(const Graphon& g, int d);

  int dim() const { return static_cast<int>(functions_.size()); }
  const std::vector<BasisFunction>& functions() const { return functions_; }
  const BasisFunction& function(int l) const { return functions_.at(l); }

  bool is_grid() const;
  // N for grid-backed bases, 0 for trigonometric ones.
  int native_grid() const;

  // N x d matrix of basis values on the uniform N-partition.
  Eigen::MatrixXd sample(int grid_size) const;
  // f(gamma) for the agent occupying interval P_agent.
  Eigen::VectorXd values_at_agent(int agent, int grid_size) const;

  Eigen::MatrixXd gram() const;
  double gram_defect() const;  // max |Gram - I|

 private:
  explicit SubspaceBasis(std::vector<BasisFunction> functions);
  std::vector<BasisFunction> functions_;
};

// Projected coordinates use the mode-major layout
//   coords = [x^{p1}; ...; x^{pd}],  x^{pl} in R^n,  (x^{pl})_i = <x_i, f_l>,
// under which projected operators take the Kronecker form M (x) D with
// M_kl = <f_k, T f_l>.
Eigen::VectorXd project_function(const GridFunction& x, const SubspaceBasis& basis);

// Component-wise reconstruction sum_l x^{pl} f_l on the uniform N-partition.
GridFunction reconstruct(const Eigen::VectorXd& coords, const SubspaceBasis& basis,
                         int grid_size);

Eigen::MatrixXd kron(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q);

// d x d matrix of <f_k, g f_l>.
Eigen::MatrixXd coupling_projection(const Graphon& g, const SubspaceBasis& basis);

// Identity coupling: I_d (x) local.
Eigen::MatrixXd project_operator(const Eigen::MatrixXd& local,
                                 const SubspaceBasis& basis);
// Graphon coupling: M (x) local with M = coupling_projection(g, basis).
Eigen::MatrixXd project_operator(const Eigen::MatrixXd& local, const Graphon& g,
                                 const SubspaceBasis& basis);

// Orthogonal split x = x^f + x_perp with x^f the component-wise reconstruction
// of the projection and <x_perp_i, f_l> = 0 for all i, l.
struct Decomposition {
  GridFunction subspace_part;
  GridFunction auxiliary_part;
};
Decomposition decompose(const GridFunction& x, const SubspaceBasis& basis);

// max_l || (I - P)(g f_l) ||; zero certifies that span(basis) is g-invariant.
double check_invariance(const Graphon& g, const SubspaceBasis& basis);

// Residual operator g - P g P with P the orthogonal projector onto the basis
// span. When the span is g-invariant the residual annihilates it.
Graphon residual(const Graphon& g, const SubspaceBasis& basis);

// operator_norm(residual(g, basis)); zero certifies the exact low-rank
// representation of g in the basis span.
double check_lowrank(const Graphon& g, const SubspaceBasis& basis);

}  // namespace glqr
