#include "glqr/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "glqr/errors.hpp"
#include "glqr/random.hpp"

namespace glqr {

namespace {

// Deterministic sign convention: first component with |v_i| above a small
// floor is made positive.
void fix_sign(Eigen::VectorXd& v) {
  const double floor = 1e-12 * v.cwiseAbs().maxCoeff();
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > floor) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

// Order: decreasing |lambda|, ties by decreasing signed value, then ascending
// original index.
std::vector<int> spectral_order(const Eigen::VectorXd& values) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double aa = std::abs(values[a]);
    const double ab = std::abs(values[b]);
    if (aa != ab) return aa > ab;
    if (values[a] != values[b]) return values[a] > values[b];
    return a < b;
  });
  return idx;
}

}  // namespace

StepGraphon::StepGraphon(Eigen::MatrixXd weights, double bound)
    : weights_(std::move(weights)), bound_(bound) {
  if (weights_.rows() != weights_.cols() || weights_.rows() < 1)
    throw ConstructionError("step graphon: weight matrix must be square");
  if (weights_ != weights_.transpose().eval())
    throw ConstructionError("step graphon: weight matrix must be exactly symmetric");
  if (weights_.size() > 0 && weights_.cwiseAbs().maxCoeff() > bound_)
    throw ConstructionError("step graphon: entry exceeds the declared bound");
}

StepGraphon::StepGraphon(Eigen::MatrixXd weights)
    : StepGraphon(weights, weights.size() > 0 ? weights.cwiseAbs().maxCoeff() : 0.0) {}

StepGraphon StepGraphon::zero(int partition_size) {
  return StepGraphon(Eigen::MatrixXd::Zero(partition_size, partition_size), 0.0);
}

DictionaryGraphon::DictionaryGraphon(std::vector<TrigFunction> dictionary,
                                     Eigen::MatrixXd coeffs)
    : dictionary_(std::move(dictionary)), coeffs_(std::move(coeffs)) {
  const int m = static_cast<int>(dictionary_.size());
  if (coeffs_.rows() != m || coeffs_.cols() != m)
    throw ConstructionError("dictionary graphon: coefficient matrix shape mismatch");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (dictionary_[i] == dictionary_[j])
        throw ConstructionError("dictionary graphon: repeated dictionary element");
  if (m > 0 && (coeffs_ - coeffs_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ConstructionError("dictionary graphon: coefficients must be symmetric");
}

StepGraphon DictionaryGraphon::to_step(int grid_size) const {
  const int m = size();
  Eigen::MatrixXd G(grid_size, m);
  for (int k = 0; k < m; ++k) G.col(k) = TrigCombo(dictionary_[k]).sample(grid_size);
  Eigen::MatrixXd W = G * coeffs_ * G.transpose();
  W = 0.5 * (W + W.transpose()).eval();
  return StepGraphon(std::move(W));
}

BasisFunction::BasisFunction(Eigen::VectorXd grid_values)
    : repr_(std::move(grid_values)) {
  if (std::get<Eigen::VectorXd>(repr_).size() < 1)
    throw DimensionError("basis function: empty grid vector");
}

BasisFunction::BasisFunction(TrigCombo combo) : repr_(std::move(combo)) {}

const Eigen::VectorXd& BasisFunction::grid_values() const {
  if (!is_grid()) throw DimensionError("basis function: not grid-backed");
  return std::get<Eigen::VectorXd>(repr_);
}

const TrigCombo& BasisFunction::combo() const {
  if (is_grid()) throw DimensionError("basis function: not a trig combination");
  return std::get<TrigCombo>(repr_);
}

int BasisFunction::native_grid() const {
  return is_grid() ? static_cast<int>(grid_values().size()) : 0;
}

Eigen::VectorXd BasisFunction::sample(int grid_size) const {
  if (is_grid()) {
    if (grid_values().size() != grid_size)
      throw DimensionError("basis function: grid size mismatch");
    return grid_values();
  }
  return combo().sample(grid_size);
}

double BasisFunction::value_at_agent(int agent, int grid_size) const {
  if (agent < 0 || agent >= grid_size)
    throw DimensionError("basis function: agent index out of range");
  if (is_grid()) {
    if (grid_values().size() != grid_size)
      throw DimensionError("basis function: grid size mismatch");
    return grid_values()[agent];
  }
  return combo()((agent + 0.5) / grid_size);
}

double inner(const BasisFunction& a, const BasisFunction& b) {
  if (!a.is_grid() && !b.is_grid()) return inner(a.combo(), b.combo());
  const int N = a.is_grid() ? a.native_grid() : b.native_grid();
  const Eigen::VectorXd va = a.sample(N);
  const Eigen::VectorXd vb = b.sample(N);
  return va.dot(vb) / N;
}

double norm(const BasisFunction& a) { return std::sqrt(inner(a, a)); }

Graphon::Graphon() : repr_(DictionaryGraphon({}, Eigen::MatrixXd::Zero(0, 0))) {}
Graphon::Graphon(StepGraphon g) : repr_(std::move(g)) {}
Graphon::Graphon(DictionaryGraphon g) : repr_(std::move(g)) {}

const StepGraphon& Graphon::step() const {
  if (!is_step()) throw DimensionError("graphon: not a step graphon");
  return std::get<StepGraphon>(repr_);
}

const DictionaryGraphon& Graphon::dictionary_form() const {
  if (is_step()) throw DimensionError("graphon: not a dictionary graphon");
  return std::get<DictionaryGraphon>(repr_);
}

int Graphon::native_grid() const {
  return is_step() ? step().partition_size() : 0;
}

GridFunction Graphon::apply(const GridFunction& v) const {
  if (is_step()) {
    const StepGraphon& g = step();
    if (v.grid_size() != g.partition_size())
      throw DimensionError("graphon apply: grid size mismatch");
    return GridFunction((g.weights() * v.values()) / g.partition_size());
  }
  const DictionaryGraphon& g = dictionary_form();
  const int N = v.grid_size();
  if (g.size() == 0) return GridFunction::Zero(N, v.dim());
  Eigen::MatrixXd G(N, g.size());
  for (int k = 0; k < g.size(); ++k)
    G.col(k) = TrigCombo(g.dictionary()[k]).sample(N);
  // w = sum_{l,k} M_lk f_l <f_k, v>, inner products as grid Riemann sums.
  Eigen::MatrixXd proj = (G.transpose() * v.values()) / N;
  return GridFunction(G * (g.coeffs() * proj));
}

BasisFunction Graphon::apply(const BasisFunction& f) const {
  if (!is_step() && !f.is_grid()) {
    const DictionaryGraphon& g = dictionary_form();
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(g.size());
    for (int k = 0; k < g.size(); ++k)
      proj[k] = inner(f.combo(), TrigCombo(g.dictionary()[k]));
    const Eigen::VectorXd out = g.coeffs() * proj;
    std::vector<std::pair<TrigFunction, double>> terms;
    for (int l = 0; l < g.size(); ++l) terms.emplace_back(g.dictionary()[l], out[l]);
    return BasisFunction(TrigCombo(std::move(terms)));
  }
  const int N = is_step() ? step().partition_size() : f.native_grid();
  GridFunction out = apply(GridFunction(f.sample(N)));
  return BasisFunction(Eigen::VectorXd(out.values().col(0)));
}

double Graphon::operator_norm() const {
  if (is_step()) {
    const StepGraphon& g = step();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        g.weights() / g.partition_size(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  const DictionaryGraphon& g = dictionary_form();
  if (g.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.coeffs(),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

SpectralDecomposition Graphon::spectral_decomposition(int count) const {
  if (count < 1) throw std::out_of_range("spectral decomposition: count must be >= 1");
  SpectralDecomposition out;
  if (is_step()) {
    const StepGraphon& g = step();
    const int N = g.partition_size();
    if (count > N)
      throw std::out_of_range("spectral decomposition: count exceeds partition size");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.weights() / N);
    const auto order = spectral_order(es.eigenvalues());
    out.eigenvalues.resize(count);
    for (int l = 0; l < count; ++l) {
      const int j = order[l];
      out.eigenvalues[l] = es.eigenvalues()[j];
      // Euclidean-unit eigenvector v maps to the L2-unit step function
      // sqrt(N) v.
      Eigen::VectorXd f = std::sqrt(static_cast<double>(N)) * es.eigenvectors().col(j);
      fix_sign(f);
      out.eigenfunctions.emplace_back(std::move(f));
    }
    return out;
  }
  const DictionaryGraphon& g = dictionary_form();
  if (count > g.size())
    throw std::out_of_range("spectral decomposition: count exceeds dictionary size");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.coeffs());
  const auto order = spectral_order(es.eigenvalues());
  out.eigenvalues.resize(count);
  for (int l = 0; l < count; ++l) {
    const int j = order[l];
    out.eigenvalues[l] = es.eigenvalues()[j];
    Eigen::VectorXd c = es.eigenvectors().col(j);
    fix_sign(c);
    std::vector<std::pair<TrigFunction, double>> terms;
    for (int k = 0; k < g.size(); ++k) terms.emplace_back(g.dictionary()[k], c[k]);
    out.eigenfunctions.emplace_back(TrigCombo(std::move(terms)));
  }
  return out;
}

StepGraphon Graphon::to_step(int grid_size) const {
  if (is_step()) {
    if (step().partition_size() != grid_size)
      throw DimensionError("graphon: cannot resample a step graphon to a different grid");
    return step();
  }
  return dictionary_form().to_step(grid_size);
}

StepGraphon step_from_matrix(const Eigen::MatrixXd& weights, double bound) {
  return StepGraphon(weights, bound);
}

int SbmSpec::total_size() const {
  int total = 0;
  for (int s : block_sizes) total += s;
  return total;
}

void SbmSpec::validate() const {
  const int K = static_cast<int>(block_probs.rows());
  if (block_probs.cols() != K || K < 1)
    throw ConstructionError("sbm: block probability matrix must be square");
  if (block_probs != block_probs.transpose().eval())
    throw ConstructionError("sbm: block probability matrix must be symmetric");
  if (block_probs.minCoeff() < 0.0 || block_probs.maxCoeff() > 1.0)
    throw ConstructionError("sbm: probabilities must lie in [0,1]");
  if (static_cast<int>(block_sizes.size()) != K)
    throw ConstructionError("sbm: one block size per block required");
  for (int s : block_sizes)
    if (s < 1) throw ConstructionError("sbm: block sizes must be positive");
}

namespace {
std::vector<int> block_of_node(const SbmSpec& spec) {
  std::vector<int> block;
  for (int b = 0; b < static_cast<int>(spec.block_sizes.size()); ++b)
    block.insert(block.end(), spec.block_sizes[b], b);
  return block;
}
}  // namespace

Eigen::MatrixXd sample_sbm(const SbmSpec& spec) {
  spec.validate();
  const int N = spec.total_size();
  const auto block = block_of_node(spec);
  std::mt19937_64 rng(spec.seed);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const double p = spec.block_probs(block[i], block[j]);
      const double edge = canonical_double(rng) < p ? 1.0 : 0.0;
      W(i, j) = edge;
      W(j, i) = edge;
    }
  }
  return W;
}

Eigen::MatrixXd sbm_expected_weights(const SbmSpec& spec) {
  spec.validate();
  const int N = spec.total_size();
  const auto block = block_of_node(spec);
  Eigen::MatrixXd W(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) W(i, j) = spec.block_probs(block[i], block[j]);
  return W;
}

}  // namespace glqr
