#include "glqr/grid_function.hpp"

#include <cmath>
#include <utility>

#include "glqr/errors.hpp"

namespace glqr {

GridFunction::GridFunction(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw DimensionError("grid function: needs at least one interval and one component");
}

GridFunction GridFunction::Zero(int grid_size, int dim) {
  return GridFunction(Eigen::MatrixXd::Zero(grid_size, dim));
}

Eigen::VectorXd GridFunction::stacked() const {
  const int N = grid_size();
  const int n = dim();
  Eigen::VectorXd v(N * n);
  for (int i = 0; i < N; ++i) v.segment(i * n, n) = values_.row(i).transpose();
  return v;
}

GridFunction GridFunction::from_stacked(const Eigen::VectorXd& v, int grid_size,
                                        int dim) {
  if (v.size() != static_cast<long>(grid_size) * dim)
    throw DimensionError("grid function: stacked vector length mismatch");
  Eigen::MatrixXd values(grid_size, dim);
  for (int i = 0; i < grid_size; ++i)
    values.row(i) = v.segment(i * dim, dim).transpose();
  return GridFunction(std::move(values));
}

double inner(const GridFunction& u, const GridFunction& v) {
  if (u.grid_size() != v.grid_size() || u.dim() != v.dim())
    throw DimensionError("grid function inner product: shape mismatch");
  return u.values().cwiseProduct(v.values()).sum() / u.grid_size();
}

double norm(const GridFunction& u) { return std::sqrt(inner(u, u)); }

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  if (a.grid_size() != b.grid_size() || a.dim() != b.dim())
    throw DimensionError("grid function sum: shape mismatch");
  return GridFunction(a.values() + b.values());
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  if (a.grid_size() != b.grid_size() || a.dim() != b.dim())
    throw DimensionError("grid function difference: shape mismatch");
  return GridFunction(a.values() - b.values());
}

GridFunction operator*(double s, const GridFunction& a) {
  return GridFunction(s * a.values());
}

}  // namespace glqr
