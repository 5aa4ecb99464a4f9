#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

#include "glqr/grid_function.hpp"
#include "glqr/trig.hpp"

namespace glqr {

// Step-function kernel on the uniform N-partition, built from an N x N
// symmetric weight matrix with entries bounded by `bound`. Its operator action
// on grid functions is z_i = (1/N) sum_j w_ij v_j, the network coupling.
class StepGraphon {
 public:
  StepGraphon(Eigen::MatrixXd weights, double bound);
  explicit StepGraphon(Eigen::MatrixXd weights);  // bound = max |entry|

  static StepGraphon zero(int partition_size);

  int partition_size() const { return static_cast<int>(weights_.rows()); }
  double bound() const { return bound_; }
  const Eigen::MatrixXd& weights() const { return weights_; }

 private:
  Eigen::MatrixXd weights_;
  double bound_ = 0.0;
};

// Kernel with an exact finite expansion over the trigonometric family:
// W(x,y) = sum_{l,k} M_lk f_l(x) f_k(y) with symmetric coefficients M. All
// operator algebra (application, spectra, projections) is exact coefficient
// arithmetic; no quadrature enters until the kernel is sampled onto a grid.
class DictionaryGraphon {
 public:
  DictionaryGraphon(std::vector<TrigFunction> dictionary, Eigen::MatrixXd coeffs);

  const std::vector<TrigFunction>& dictionary() const { return dictionary_; }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  int size() const { return static_cast<int>(dictionary_.size()); }

  // Kernel values at partition midpoints.
  StepGraphon to_step(int grid_size) const;

 private:
  std::vector<TrigFunction> dictionary_;
  Eigen::MatrixXd coeffs_;
};

// A square-integrable function on [0,1], either grid values on the uniform
// N-partition or an exact trigonometric combination. Used for subspace basis
// elements and graphon eigenfunctions.
class BasisFunction {
 public:
  explicit BasisFunction(Eigen::VectorXd grid_values);
  explicit BasisFunction(TrigCombo combo);

  bool is_grid() const { return std::holds_alternative<Eigen::VectorXd>(repr_); }
  const Eigen::VectorXd& grid_values() const;
  const TrigCombo& combo() const;

  // N for grid functions, 0 for trigonometric combinations.
  int native_grid() const;

  // Values on the uniform N-partition; grid-backed functions require a
  // matching N, trigonometric ones evaluate at interval midpoints.
  Eigen::VectorXd sample(int grid_size) const;
  double value_at_agent(int agent, int grid_size) const;

 private:
  std::variant<Eigen::VectorXd, TrigCombo> repr_;
};

double inner(const BasisFunction& a, const BasisFunction& b);
double norm(const BasisFunction& a);

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;              // sorted by decreasing |lambda|
  std::vector<BasisFunction> eigenfunctions;  // orthonormal in L2[0,1]
};

// Symmetric bounded coupling kernel, either a step function or a dictionary
// expansion. Immutable; safe to share across threads.
class Graphon {
 public:
  Graphon();  // zero kernel
  Graphon(StepGraphon g);        // NOLINT
  Graphon(DictionaryGraphon g);  // NOLINT

  bool is_step() const { return std::holds_alternative<StepGraphon>(repr_); }
  const StepGraphon& step() const;
  const DictionaryGraphon& dictionary_form() const;
  // N for step graphons, 0 for dictionary graphons (any grid admissible).
  int native_grid() const;

  // w_i = (1/N) sum_j w_ij v_j for step kernels; dictionary kernels evaluate
  // sum_{l,k} M_lk f_l <f_k, v> on the grid.
  GridFunction apply(const GridFunction& v) const;
  BasisFunction apply(const BasisFunction& f) const;

  // max |lambda| over the spectrum.
  double operator_norm() const;

  // Leading `count` eigenpairs, sorted by decreasing |lambda|, ties broken by
  // decreasing signed value, then ascending index. Eigenfunctions carry the
  // sign convention: first nonzero component positive.
  SpectralDecomposition spectral_decomposition(int count) const;

  StepGraphon to_step(int grid_size) const;

 private:
  std::variant<StepGraphon, DictionaryGraphon> repr_;
};

// Construction contract for network couplings: square, exactly symmetric,
// max |entry| <= bound.
StepGraphon step_from_matrix(const Eigen::MatrixXd& weights, double bound);

// Stochastic block model: K blocks with symmetric connection probabilities.
struct SbmSpec {
  Eigen::MatrixXd block_probs;   // K x K, symmetric, entries in [0,1]
  std::vector<int> block_sizes;  // K positive sizes
  std::uint64_t seed = 0;

  int total_size() const;
  void validate() const;
};

// Symmetric Bernoulli 0/1 adjacency with zero diagonal; entry (i,j), i<j,
// drawn with probability block_probs[block(i)][block(j)]. Deterministic and
// bit-exact for a given seed.
Eigen::MatrixXd sample_sbm(const SbmSpec& spec);

// Block-constant expected weights (the graphon limit of the model). Exactly
// rank K; the diagonal carries the within-block probability.
Eigen::MatrixXd sbm_expected_weights(const SbmSpec& spec);

}  // namespace glqr
