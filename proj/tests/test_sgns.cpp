#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "jet/rng.hpp"
#include "jet/sgns.hpp"

using jet::Rng;
using jet::sgns::Matrix;

namespace {

// Finite-difference oracle: central differences of the pure objective with
// respect to one coordinate of one participating row.
struct FdProblem {
  Matrix<double> targets;  // row 0 is v
  Matrix<double> ctx;
  std::vector<uint32_t> contexts;
  std::vector<uint32_t> negatives;

  double objective_value() const {
    std::vector<std::span<const double>> c, n;
    for (uint32_t i : contexts) c.push_back(ctx.row(i));
    for (uint32_t i : negatives) n.push_back(ctx.row(i));
    return jet::sgns::objective<double>(targets.row(0), c, n);
  }

  double fd(double* coord, double h = 1e-6) {
    const double saved = *coord;
    *coord = saved + h;
    const double up = objective_value();
    *coord = saved - h;
    const double down = objective_value();
    *coord = saved;
    return (up - down) / (2 * h);
  }
};

FdProblem random_problem(Rng& rng, uint32_t dim, uint32_t n_ctx, uint32_t n_neg) {
  FdProblem p;
  p.targets = Matrix<double>(1, dim);
  p.ctx = Matrix<double>(n_ctx + n_neg, dim);
  for (auto& x : p.targets.data) x = rng.next_double() * 4 - 2;
  for (auto& x : p.ctx.data) x = rng.next_double() * 4 - 2;
  for (uint32_t i = 0; i < n_ctx; ++i) p.contexts.push_back(i);
  for (uint32_t i = 0; i < n_neg; ++i) p.negatives.push_back(n_ctx + i);
  return p;
}

double rel_norm_error(std::span<const double> a, std::span<const double> b) {
  double d2 = 0, b2 = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    d2 += (a[i] - b[i]) * (a[i] - b[i]);
    b2 += b[i] * b[i];
  }
  return std::sqrt(d2) / std::max(std::sqrt(b2), 1e-8);
}

}  // namespace

TEST_CASE("objective at zero dot products") {
  // |C| = 2, |N| = 10, all dots 0: 12 * ln(0.5).
  Matrix<double> targets(1, 3);
  Matrix<double> ctx(12, 3);
  std::vector<std::span<const double>> c, n;
  for (uint32_t i = 0; i < 2; ++i) c.push_back(ctx.row(i));
  for (uint32_t i = 2; i < 12; ++i) n.push_back(ctx.row(i));
  const double obj = jet::sgns::objective<double>(targets.row(0), c, n);
  CHECK(obj == doctest::Approx(12 * std::log(0.5)).epsilon(1e-12));
  CHECK(obj <= 0);
}

TEST_CASE("objective hand example and saturation") {
  // v=(1,0), C={(1,0)}, N={(1,0)}: ln s(1) + ln s(-1).
  Matrix<double> targets(1, 2);
  targets.row(0)[0] = 1;
  Matrix<double> ctx(1, 2);
  ctx.row(0)[0] = 1;
  std::vector<std::span<const double>> c = {ctx.row(0)};
  std::vector<std::span<const double>> n = {ctx.row(0)};
  const double expected = std::log(1 / (1 + std::exp(-1.0))) + std::log(1 / (1 + std::exp(1.0)));
  CHECK(jet::sgns::objective<double>(targets.row(0), c, n) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(-1.6265).epsilon(1e-4));

  // Huge positive dot with no negatives saturates to 0 from below.
  Matrix<double> big(1, 2);
  big.row(0)[0] = 50;
  Matrix<double> bc(1, 2);
  bc.row(0)[0] = 50;
  std::vector<std::span<const double>> cb = {bc.row(0)};
  const double sat = jet::sgns::objective<double>(big.row(0), cb, {});
  CHECK(sat < 0);
  CHECK(sat > -1e-9);
}

TEST_CASE("objective rejects dimension mismatches") {
  Matrix<double> targets(1, 3);
  Matrix<double> ctx(1, 4);
  std::vector<std::span<const double>> c = {ctx.row(0)};
  CHECK_THROWS(jet::sgns::objective<double>(targets.row(0), c, {}));
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const uint32_t dim = 1 + rng.below(8);
    const uint32_t n_ctx = 1 + rng.below(4);
    const uint32_t n_neg = rng.below(9);
    FdProblem p = random_problem(rng, dim, n_ctx, n_neg);

    // Applied deltas with lr = 1, weight = 1 are exactly the analytic
    // gradient because all rows here are distinct.
    FdProblem applied = p;
    std::vector<double> grad(dim);
    jet::sgns::apply_event<double>(applied.targets, 0, applied.ctx, p.contexts, p.negatives, 1.0,
                                   1.0, grad);

    std::vector<double> analytic, numeric;
    auto compare_row = [&](std::span<double> before, std::span<const double> after) {
      analytic.assign(after.begin(), after.end());
      for (size_t i = 0; i < analytic.size(); ++i) analytic[i] -= before[i];
      numeric.resize(before.size());
      for (size_t i = 0; i < before.size(); ++i) numeric[i] = p.fd(&before[i]);
      CHECK(rel_norm_error(analytic, numeric) <= 1e-5);
    };
    compare_row(p.targets.row(0), applied.targets.row(0));
    for (uint32_t row = 0; row < p.ctx.rows; ++row) {
      compare_row(p.ctx.row(row), applied.ctx.row(row));
    }
  }
}

TEST_CASE("zero learning rate leaves parameters untouched") {
  Rng rng(8);
  FdProblem p = random_problem(rng, 5, 2, 4);
  FdProblem applied = p;
  std::vector<double> grad(5);
  jet::sgns::apply_event<double>(applied.targets, 0, applied.ctx, p.contexts, p.negatives, 0.0,
                                 1.0, grad);
  CHECK(applied.targets.data == p.targets.data);
  CHECK(applied.ctx.data == p.ctx.data);
}

TEST_CASE("half-weight event produces exactly half the deltas") {
  // Entity rows start equal to the term row and see the same contexts and
  // negatives, so a weight of 1/2 must halve every delta bit-exactly.
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const uint32_t dim = 1 + rng.below(16);
    Matrix<double> targets(2, dim);
    for (uint32_t i = 0; i < dim; ++i) {
      const double x = rng.next_double() - 0.5;
      targets.row(0)[i] = x;
      targets.row(1)[i] = x;  // entity row == term row
    }
    Matrix<double> ctx(6, dim);
    for (auto& x : ctx.data) x = rng.next_double() - 0.5;
    const std::vector<uint32_t> contexts = {0, 1};
    const std::vector<uint32_t> negatives = {2, 3, 4, 5};
    const double lr = 0.05;

    Matrix<double> t_targets = targets, t_ctx = ctx;
    Matrix<double> e_targets = targets, e_ctx = ctx;
    std::vector<double> grad(dim);
    jet::sgns::apply_event<double>(t_targets, 0, t_ctx, contexts, negatives, lr, 1.0, grad);
    jet::sgns::apply_event<double>(e_targets, 1, e_ctx, contexts, negatives, lr, 0.5, grad);

    for (uint32_t i = 0; i < dim; ++i) {
      const double term_delta = t_targets.row(0)[i] - targets.row(0)[i];
      const double entity_delta = e_targets.row(1)[i] - targets.row(1)[i];
      CHECK(entity_delta == 0.5 * term_delta);
    }
    for (size_t i = 0; i < ctx.data.size(); ++i) {
      const double term_side = t_ctx.data[i] - ctx.data[i];
      const double entity_side = e_ctx.data[i] - ctx.data[i];
      CHECK(entity_side == 0.5 * term_side);
    }
  }
}
