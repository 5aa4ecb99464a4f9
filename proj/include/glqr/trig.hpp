#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace glqr {

// Element of the orthonormal trigonometric family on [0,1]:
//   one    ->  1
//   sin k  ->  sqrt(2) sin(2 pi k x),  k >= 1
//   cos k  ->  sqrt(2) cos(2 pi k x),  k >= 1
// Distinct elements are exactly orthonormal in L2[0,1], so inner products of
// combinations reduce to coefficient arithmetic with no quadrature.
struct TrigFunction {
  enum class Kind { One, Sin, Cos };

  Kind kind = Kind::One;
  int frequency = 0;  // >= 1 for Sin/Cos, 0 for One

  static TrigFunction one() { return {Kind::One, 0}; }
  static TrigFunction sine(int k);
  static TrigFunction cosine(int k);

  double operator()(double x) const;

  // "one", "sin3", "cos1"; parse() accepts the same forms.
  std::string name() const;
  static TrigFunction parse(const std::string& text);

  friend bool operator==(const TrigFunction& a, const TrigFunction& b) {
    return a.kind == b.kind && a.frequency == b.frequency;
  }
  friend bool operator<(const TrigFunction& a, const TrigFunction& b) {
    if (a.frequency != b.frequency) return a.frequency < b.frequency;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  }
};

// Finite linear combination of trigonometric dictionary elements. Terms are
// kept sorted with duplicates merged, so equality of spans and inner products
// are exact coefficient operations.
class TrigCombo {
 public:
  TrigCombo() = default;
  TrigCombo(TrigFunction f);  // NOLINT: single element, coefficient 1
  explicit TrigCombo(std::vector<std::pair<TrigFunction, double>> terms);

  const std::vector<std::pair<TrigFunction, double>>& terms() const {
    return terms_;
  }
  bool empty() const { return terms_.empty(); }

  double operator()(double x) const;

  // Values at the midpoints (i + 1/2)/N of the uniform N-partition.
  Eigen::VectorXd sample(int grid_size) const;

  TrigCombo& operator+=(const TrigCombo& other);
  TrigCombo& operator-=(const TrigCombo& other);
  TrigCombo& operator*=(double s);

 private:
  void normalize();
  std::vector<std::pair<TrigFunction, double>> terms_;
};

TrigCombo operator+(TrigCombo a, const TrigCombo& b);
TrigCombo operator-(TrigCombo a, const TrigCombo& b);
TrigCombo operator*(double s, TrigCombo a);

// Exact L2[0,1] inner product by orthonormality of the family.
double inner(const TrigCombo& a, const TrigCombo& b);
double norm(const TrigCombo& a);

}  // namespace glqr
