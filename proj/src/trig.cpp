#include "glqr/trig.hpp"

#include <algorithm>
#include <cmath>

#include "glqr/errors.hpp"

namespace glqr {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TrigFunction TrigFunction::sine(int k) {
  if (k < 1) throw ConstructionError("trig: sine frequency must be >= 1");
  return {Kind::Sin, k};
}

TrigFunction TrigFunction::cosine(int k) {
  if (k < 1) throw ConstructionError("trig: cosine frequency must be >= 1");
  return {Kind::Cos, k};
}

double TrigFunction::operator()(double x) const {
  switch (kind) {
    case Kind::One:
      return 1.0;
    case Kind::Sin:
      return std::sqrt(2.0) * std::sin(kTwoPi * frequency * x);
    case Kind::Cos:
      return std::sqrt(2.0) * std::cos(kTwoPi * frequency * x);
  }
  return 0.0;
}

std::string TrigFunction::name() const {
  switch (kind) {
    case Kind::One:
      return "one";
    case Kind::Sin:
      return "sin" + std::to_string(frequency);
    case Kind::Cos:
      return "cos" + std::to_string(frequency);
  }
  return "";
}

TrigFunction TrigFunction::parse(const std::string& text) {
  if (text == "one" || text == "1") return one();
  auto parse_freq = [&](std::size_t offset) {
    int k = 0;
    if (offset >= text.size()) throw ConfigError("trig: missing frequency in '" + text + "'");
    for (std::size_t i = offset; i < text.size(); ++i) {
      if (text[i] < '0' || text[i] > '9')
        throw ConfigError("trig: bad dictionary element '" + text + "'");
      k = 10 * k + (text[i] - '0');
    }
    return k;
  };
  if (text.rfind("sin", 0) == 0) return sine(parse_freq(3));
  if (text.rfind("cos", 0) == 0) return cosine(parse_freq(3));
  throw ConfigError("trig: bad dictionary element '" + text +
                    "' (expected one, sinK or cosK)");
}

TrigCombo::TrigCombo(TrigFunction f) : terms_{{f, 1.0}} {}

TrigCombo::TrigCombo(std::vector<std::pair<TrigFunction, double>> terms)
    : terms_(std::move(terms)) {
  normalize();
}

void TrigCombo::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<TrigFunction, double>> merged;
  for (const auto& [f, c] : terms_) {
    if (!merged.empty() && merged.back().first == f) {
      merged.back().second += c;
    } else {
      merged.emplace_back(f, c);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const auto& t) { return t.second == 0.0; }),
               merged.end());
  terms_ = std::move(merged);
}

double TrigCombo::operator()(double x) const {
  double v = 0.0;
  for (const auto& [f, c] : terms_) v += c * f(x);
  return v;
}

Eigen::VectorXd TrigCombo::sample(int grid_size) const {
  if (grid_size < 1) throw DimensionError("trig: grid size must be >= 1");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    const double x = (i + 0.5) / grid_size;
    out[i] = (*this)(x);
  }
  return out;
}

TrigCombo& TrigCombo::operator+=(const TrigCombo& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  normalize();
  return *this;
}

TrigCombo& TrigCombo::operator-=(const TrigCombo& other) {
  for (const auto& [f, c] : other.terms_) terms_.emplace_back(f, -c);
  normalize();
  return *this;
}

TrigCombo& TrigCombo::operator*=(double s) {
  for (auto& [f, c] : terms_) c *= s;
  normalize();
  return *this;
}

TrigCombo operator+(TrigCombo a, const TrigCombo& b) { return a += b; }
TrigCombo operator-(TrigCombo a, const TrigCombo& b) { return a -= b; }
TrigCombo operator*(double s, TrigCombo a) { return a *= s; }

double inner(const TrigCombo& a, const TrigCombo& b) {
  // Both term lists are sorted; merge-walk the common elements.
  double acc = 0.0;
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  while (ia != a.terms().end() && ib != b.terms().end()) {
    if (ia->first == ib->first) {
      acc += ia->second * ib->second;
      ++ia;
      ++ib;
    } else if (ia->first < ib->first) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return acc;
}

double norm(const TrigCombo& a) { return std::sqrt(inner(a, a)); }

}  // namespace glqr
