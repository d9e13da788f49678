#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace jet::sgns {

// Dense row-major parameter table.
template <class Real>
struct Matrix {
  uint32_t rows = 0;
  uint32_t dim = 0;
  std::vector<Real> data;

  Matrix() = default;
  Matrix(uint32_t r, uint32_t d) : rows(r), dim(d), data(static_cast<size_t>(r) * d, Real(0)) {}

  std::span<Real> row(uint32_t i) { return {data.data() + static_cast<size_t>(i) * dim, dim}; }
  std::span<const Real> row(uint32_t i) const {
    return {data.data() + static_cast<size_t>(i) * dim, dim};
  }
};

template <class Real>
inline Real sigmoid(Real x) {
  return Real(1) / (Real(1) + std::exp(-x));
}

// log(sigmoid(x)) without underflow on either tail.
template <class Real>
inline Real log_sigmoid(Real x) {
  if (x >= Real(0)) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

template <class Real>
inline Real dot(std::span<const Real> a, std::span<const Real> b) {
  Real sum = 0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

// Context objective for one target vector: sum_c log s(c.v) + sum_n log s(-n.v).
// Always <= 0. Throws on dimension mismatch.
template <class Real>
Real objective(std::span<const Real> v, std::span<const std::span<const Real>> contexts,
               std::span<const std::span<const Real>> negatives) {
  Real total = 0;
  for (const auto& c : contexts) {
    if (c.size() != v.size()) throw std::invalid_argument("objective: context dim mismatch");
    total += log_sigmoid(dot(c, v));
  }
  for (const auto& n : negatives) {
    if (n.size() != v.size()) throw std::invalid_argument("objective: negative dim mismatch");
    total += log_sigmoid(-dot(n, v));
  }
  return total;
}

// One ascent step on the context objective, scaled by lr * weight.
// Context and negative rows live in `context_table`; the target row in
// `target_table`. For each context c: s = sigmoid(c.v), the target gradient
// gains (1-s)*c and c gains lr*weight*(1-s)*v; negatives mirror this with
// -sigmoid(n.v). The target row moves last, so every applied delta equals
// lr * weight * (analytic gradient at the pre-step point) whenever the
// participating rows are distinct. Returns the objective value accumulated
// from the sigmoids as they were read.
template <class Real>
Real apply_event(Matrix<Real>& target_table, uint32_t target, Matrix<Real>& context_table,
                 std::span<const uint32_t> contexts, std::span<const uint32_t> negatives,
                 Real lr, Real weight, std::span<Real> grad) {
  auto v = target_table.row(target);
  const uint32_t dim = target_table.dim;
  for (uint32_t i = 0; i < dim; ++i) grad[i] = Real(0);
  Real obj = 0;
  const Real step = lr * weight;
  for (uint32_t c : contexts) {
    auto cv = context_table.row(c);
    const Real z = dot<Real>(cv, v);
    const Real g = Real(1) - sigmoid(z);
    obj += log_sigmoid(z);
    for (uint32_t i = 0; i < dim; ++i) grad[i] += g * cv[i];
    const Real delta = step * g;
    for (uint32_t i = 0; i < dim; ++i) cv[i] += delta * v[i];
  }
  for (uint32_t n : negatives) {
    auto nv = context_table.row(n);
    const Real z = dot<Real>(nv, v);
    const Real s = sigmoid(z);
    obj += log_sigmoid(-z);
    for (uint32_t i = 0; i < dim; ++i) grad[i] -= s * nv[i];
    const Real delta = step * s;
    for (uint32_t i = 0; i < dim; ++i) nv[i] -= delta * v[i];
  }
  for (uint32_t i = 0; i < dim; ++i) v[i] += step * grad[i];
  return obj;
}

}  // namespace jet::sgns
