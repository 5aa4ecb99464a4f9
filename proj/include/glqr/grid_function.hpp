#pragma once

#include <Eigen/Dense>

namespace glqr {

// Piecewise-constant function on the uniform N-partition of [0,1] with values
// in R^n. Row i holds the value on interval P_i. Inner products are Riemann
// sums with weight 1/N, which are exact for step functions.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(Eigen::MatrixXd values);

  static GridFunction Zero(int grid_size, int dim);

  int grid_size() const { return static_cast<int>(values_.rows()); }
  int dim() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::MatrixXd& values() { return values_; }

  Eigen::VectorXd agent(int i) const { return values_.row(i).transpose(); }

  // Stacked vector [x^1; ...; x^N] with x^i in R^n.
  Eigen::VectorXd stacked() const;
  static GridFunction from_stacked(const Eigen::VectorXd& v, int grid_size,
                                   int dim);

 private:
  Eigen::MatrixXd values_;
};

// (1/N) sum_i <u_i, v_i>.
double inner(const GridFunction& u, const GridFunction& v);
double norm(const GridFunction& u);

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double s, const GridFunction& a);

}  // namespace glqr
