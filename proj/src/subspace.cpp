#include "glqr/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "glqr/errors.hpp"

namespace glqr {

namespace {

constexpr double kGramTolerance = 1e-8;
constexpr double kPivotTolerance = 1e-8;

void require_orthonormal(const SubspaceBasis& basis) {
  const double defect = basis.gram_defect();
  if (defect > kGramTolerance)
    throw ConstructionError("subspace basis: Gram matrix deviates from identity by " +
                            std::to_string(defect));
}

// Merged dictionary of a graphon's elements and a trig basis's terms, with the
// graphon coefficients embedded and the basis coefficient columns alongside.
struct MergedDictionary {
  std::vector<TrigFunction> elements;
  Eigen::MatrixXd graphon_coeffs;  // m x m
  Eigen::MatrixXd basis_coeffs;    // m x d, orthonormal columns
};

MergedDictionary merge_dictionary(const DictionaryGraphon& g,
                                  const SubspaceBasis& basis) {
  std::vector<TrigFunction> elements = g.dictionary();
  auto index_of = [&elements](const TrigFunction& f) -> int {
    for (int i = 0; i < static_cast<int>(elements.size()); ++i)
      if (elements[i] == f) return i;
    return -1;
  };
  for (const BasisFunction& bf : basis.functions())
    for (const auto& [f, c] : bf.combo().terms())
      if (index_of(f) < 0) elements.push_back(f);

  const int m = static_cast<int>(elements.size());
  MergedDictionary out;
  out.graphon_coeffs = Eigen::MatrixXd::Zero(m, m);
  out.graphon_coeffs.topLeftCorner(g.size(), g.size()) = g.coeffs();
  out.basis_coeffs = Eigen::MatrixXd::Zero(m, basis.dim());
  for (int l = 0; l < basis.dim(); ++l)
    for (const auto& [f, c] : basis.function(l).combo().terms())
      out.basis_coeffs(index_of(f), l) = c;
  out.elements = std::move(elements);
  return out;
}

}  // namespace

SubspaceBasis::SubspaceBasis(std::vector<BasisFunction> functions)
    : functions_(std::move(functions)) {
  if (functions_.empty())
    throw ConstructionError("subspace basis: at least one function required");
  const bool grid = functions_.front().is_grid();
  for (const BasisFunction& f : functions_) {
    if (f.is_grid() != grid)
      throw ConstructionError("subspace basis: mixed grid and trig functions");
    if (grid && f.native_grid() != functions_.front().native_grid())
      throw ConstructionError("subspace basis: inconsistent grid sizes");
  }
}

SubspaceBasis SubspaceBasis::from_grid(const Eigen::MatrixXd& columns) {
  const int N = static_cast<int>(columns.rows());
  const int d = static_cast<int>(columns.cols());
  if (N < 1 || d < 1) throw ConstructionError("subspace basis: empty column set");
  if (d > N) throw ConstructionError("subspace basis: more functions than grid intervals");
  // Modified Gram-Schmidt in the (1/N)-weighted inner product.
  Eigen::MatrixXd Q = columns;
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < j; ++k) {
      const double r = Q.col(k).dot(Q.col(j)) / N;
      Q.col(j) -= r * Q.col(k);
    }
    const double pivot = std::sqrt(Q.col(j).squaredNorm() / N);
    if (pivot < kPivotTolerance)
      throw ConstructionError("subspace basis: rank-deficient columns (pivot " +
                              std::to_string(pivot) + ")");
    Q.col(j) /= pivot;
  }
  std::vector<BasisFunction> fns;
  fns.reserve(d);
  for (int j = 0; j < d; ++j) fns.emplace_back(Eigen::VectorXd(Q.col(j)));
  return SubspaceBasis(std::move(fns));
}

SubspaceBasis SubspaceBasis::from_functions(std::vector<BasisFunction> functions) {
  SubspaceBasis basis(std::move(functions));
  require_orthonormal(basis);
  return basis;
}

SubspaceBasis SubspaceBasis::from_trig(const std::vector<TrigCombo>& combos) {
  std::vector<BasisFunction> fns;
  fns.reserve(combos.size());
  for (const TrigCombo& c : combos) fns.emplace_back(c);
  return from_functions(std::move(fns));
}

SubspaceBasis SubspaceBasis::eigenbasis(const Graphon& g, int d) {
  SpectralDecomposition spec = g.spectral_decomposition(d);
  return from_functions(std::move(spec.eigenfunctions));
}

bool SubspaceBasis::is_grid() const { return functions_.front().is_grid(); }

int SubspaceBasis::native_grid() const { return functions_.front().native_grid(); }

Eigen::MatrixXd SubspaceBasis::sample(int grid_size) const {
  Eigen::MatrixXd out(grid_size, dim());
  for (int l = 0; l < dim(); ++l) out.col(l) = functions_[l].sample(grid_size);
  return out;
}

Eigen::VectorXd SubspaceBasis::values_at_agent(int agent, int grid_size) const {
  Eigen::VectorXd out(dim());
  for (int l = 0; l < dim(); ++l)
    out[l] = functions_[l].value_at_agent(agent, grid_size);
  return out;
}

Eigen::MatrixXd SubspaceBasis::gram() const {
  Eigen::MatrixXd G(dim(), dim());
  for (int k = 0; k < dim(); ++k)
    for (int l = 0; l < dim(); ++l) G(k, l) = inner(functions_[k], functions_[l]);
  return G;
}

double SubspaceBasis::gram_defect() const {
  return (gram() - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

Eigen::VectorXd project_function(const GridFunction& x, const SubspaceBasis& basis) {
  const int N = x.grid_size();
  const int n = x.dim();
  const int d = basis.dim();
  const Eigen::MatrixXd phi = basis.sample(N);
  const Eigen::MatrixXd coords = (phi.transpose() * x.values()) / N;  // d x n
  Eigen::VectorXd out(static_cast<long>(n) * d);
  for (int l = 0; l < d; ++l) out.segment(l * n, n) = coords.row(l).transpose();
  return out;
}

GridFunction reconstruct(const Eigen::VectorXd& coords, const SubspaceBasis& basis,
                         int grid_size) {
  const int d = basis.dim();
  if (coords.size() % d != 0)
    throw DimensionError("reconstruct: coordinate length not a multiple of the basis dimension");
  const int n = static_cast<int>(coords.size()) / d;
  Eigen::MatrixXd coord_rows(d, n);
  for (int l = 0; l < d; ++l)
    coord_rows.row(l) = coords.segment(l * n, n).transpose();
  const Eigen::MatrixXd phi = basis.sample(grid_size);
  return GridFunction(phi * coord_rows);
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q) {
  Eigen::MatrixXd out(P.rows() * Q.rows(), P.cols() * Q.cols());
  for (int i = 0; i < P.rows(); ++i)
    for (int j = 0; j < P.cols(); ++j)
      out.block(i * Q.rows(), j * Q.cols(), Q.rows(), Q.cols()) = P(i, j) * Q;
  return out;
}

Eigen::MatrixXd coupling_projection(const Graphon& g, const SubspaceBasis& basis) {
  const int d = basis.dim();
  if (!g.is_step() && !basis.is_grid()) {
    // Exact coefficient path.
    const MergedDictionary merged = merge_dictionary(g.dictionary_form(), basis);
    return merged.basis_coeffs.transpose() * merged.graphon_coeffs *
           merged.basis_coeffs;
  }
  const int N = g.is_step() ? g.native_grid() : basis.native_grid();
  const Eigen::MatrixXd phi = basis.sample(N);
  Eigen::MatrixXd M(d, d);
  for (int l = 0; l < d; ++l) {
    const GridFunction gf = g.apply(GridFunction(Eigen::MatrixXd(phi.col(l))));
    M.col(l) = (phi.transpose() * gf.values().col(0)) / N;
  }
  return M;
}

Eigen::MatrixXd project_operator(const Eigen::MatrixXd& local,
                                 const SubspaceBasis& basis) {
  return kron(Eigen::MatrixXd::Identity(basis.dim(), basis.dim()), local);
}

Eigen::MatrixXd project_operator(const Eigen::MatrixXd& local, const Graphon& g,
                                 const SubspaceBasis& basis) {
  return kron(coupling_projection(g, basis), local);
}

Decomposition decompose(const GridFunction& x, const SubspaceBasis& basis) {
  const Eigen::VectorXd coords = project_function(x, basis);
  GridFunction subspace_part = reconstruct(coords, basis, x.grid_size());
  GridFunction auxiliary_part = x - subspace_part;
  return {std::move(subspace_part), std::move(auxiliary_part)};
}

double check_invariance(const Graphon& g, const SubspaceBasis& basis) {
  require_orthonormal(basis);
  const int d = basis.dim();
  if (!g.is_step() && !basis.is_grid()) {
    double worst = 0.0;
    for (int l = 0; l < d; ++l) {
      BasisFunction w = g.apply(basis.function(l));
      TrigCombo r = w.combo();
      for (int k = 0; k < d; ++k) {
        const double c = inner(basis.function(k).combo(), w.combo());
        r -= c * basis.function(k).combo();
      }
      worst = std::max(worst, norm(r));
    }
    return worst;
  }
  const int N = g.is_step() ? g.native_grid() : basis.native_grid();
  const Eigen::MatrixXd phi = basis.sample(N);
  double worst = 0.0;
  for (int l = 0; l < d; ++l) {
    const GridFunction gf = g.apply(GridFunction(Eigen::MatrixXd(phi.col(l))));
    const Eigen::VectorXd w = gf.values().col(0);
    const Eigen::VectorXd r = w - phi * ((phi.transpose() * w) / N);
    worst = std::max(worst, std::sqrt(r.squaredNorm() / N));
  }
  return worst;
}

Graphon residual(const Graphon& g, const SubspaceBasis& basis) {
  require_orthonormal(basis);
  if (!g.is_step() && !basis.is_grid()) {
    const MergedDictionary merged = merge_dictionary(g.dictionary_form(), basis);
    const Eigen::MatrixXd& C = merged.basis_coeffs;
    const Eigen::MatrixXd P = C * C.transpose();
    Eigen::MatrixXd M = merged.graphon_coeffs - P * merged.graphon_coeffs * P;
    M = 0.5 * (M + M.transpose()).eval();
    return Graphon(DictionaryGraphon(merged.elements, std::move(M)));
  }
  const int N = g.is_step() ? g.native_grid() : basis.native_grid();
  const StepGraphon sg = g.to_step(N);
  const Eigen::MatrixXd phi = basis.sample(N);
  // Sampled trig bases must stay orthonormal under the grid inner product.
  const Eigen::MatrixXd gram = (phi.transpose() * phi) / N;
  if ((gram - Eigen::MatrixXd::Identity(basis.dim(), basis.dim()))
          .cwiseAbs()
          .maxCoeff() > kGramTolerance)
    throw ConstructionError("residual: sampled basis loses orthonormality on this grid");
  const Eigen::MatrixXd& W = sg.weights();
  Eigen::MatrixXd Wr =
      W - phi * (phi.transpose() * W * phi) * phi.transpose() / (static_cast<double>(N) * N);
  Wr = 0.5 * (Wr + Wr.transpose()).eval();
  return Graphon(StepGraphon(std::move(Wr)));
}

double check_lowrank(const Graphon& g, const SubspaceBasis& basis) {
  return residual(g, basis).operator_norm();
}

}  // namespace glqr
