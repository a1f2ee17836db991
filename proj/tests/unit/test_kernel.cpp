/*
 * Copyright 2026 The dkm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <cmath>
#include <random>

#include "doctest.h"
#include "dkm/error.hpp"
#include "dkm/kernel.hpp"
#include "dkm/parallel.hpp"
#include "support/oracles.hpp"

using namespace dkm;

namespace {

double eval(const KernelSpec& s, const Vector& x, const Vector& y) {
  return eval_kernel(s, std::span<const double>(x.data(), x.size()),
                     std::span<const double>(y.data(), y.size()));
}

}  // namespace

TEST_CASE("kernel spec validation") {
  CHECK_NOTHROW(KernelSpec::exp_cos_sim(0.05));
  CHECK_NOTHROW(KernelSpec::exp_cos_sim(1.0));
  CHECK_THROWS_AS(KernelSpec::exp_cos_sim(0.04), InvalidArgument);
  CHECK_THROWS_AS(KernelSpec::exp_cos_sim(1.5), InvalidArgument);
  CHECK_THROWS_AS(KernelSpec::exp_cos_sim(0.2, 0.0), InvalidArgument);
  CHECK_THROWS_AS(KernelSpec::squared_exponential(0.0), InvalidArgument);
}

TEST_CASE("eval_kernel hand values") {
  const KernelSpec ecs = KernelSpec::exp_cos_sim(0.2);
  Vector x(3), y(3);
  x << 1, 0, 0;
  y << 0, 1, 0;
  CHECK(eval(ecs, x, y) == 1.0);
  CHECK(eval(ecs, x, x) == doctest::Approx(std::exp(5.0)).epsilon(1e-3));
  CHECK(eval(ecs, x, x) == doctest::Approx(std::exp(5.0 / std::sqrt(1 + 1e-6))).epsilon(1e-12));

  const KernelSpec se = KernelSpec::squared_exponential(0.1);
  Vector a(1), b(1);
  a << 0.3;
  b << 0.4;
  CHECK(eval(se, a, b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("kernel symmetry, positivity and scale invariance") {
  std::mt19937_64 rng(3);
  const auto f = oracle::random_unit_rows(40, 16, rng);
  const KernelSpec ecs = KernelSpec::exp_cos_sim(0.2);
  const KernelSpec se = KernelSpec::squared_exponential(0.5);
  for (Eigen::Index i = 0; i + 1 < f.rows(); ++i) {
    const Vector x = f.row(i).transpose(), y = f.row(i + 1).transpose();
    CHECK(eval(ecs, x, y) == eval(ecs, y, x));
    CHECK(eval(se, x, y) == eval(se, y, x));
    CHECK(eval(ecs, x, y) > 0.0);
    CHECK(eval(se, x, y) > 0.0);
    for (double alpha : {0.5, 2.0, 10.0})
      CHECK(eval(ecs, Vector(alpha * x), y) == doctest::Approx(eval(ecs, x, y)).epsilon(1e-3));
  }
}

TEST_CASE("gram matrices") {
  std::mt19937_64 rng(4);
  const auto x = oracle::random_unit_rows(64, 12, rng);
  const auto y = oracle::random_unit_rows(48, 12, rng);
  const KernelSpec ecs = KernelSpec::exp_cos_sim(0.2);

  const FeatureMatrix one = x.topRows(1);
  const GramMatrix g1 = gram(ecs, one, one);
  REQUIRE(g1.rows() == 1);
  CHECK(g1.values(0, 0) == eval(ecs, x.row(0).transpose(), x.row(0).transpose()));

  const GramMatrix gxy = gram(ecs, x, y);
  const GramMatrix gyx = gram(ecs, y, x);
  CHECK((gxy.values - gyx.values.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const GramMatrix gxx = gram(ecs, x, x);
  double worst = 0;
  for (Eigen::Index i = 0; i < 64; ++i)
    for (Eigen::Index j = 0; j < 64; ++j)
      worst = std::max(worst, std::abs(gxx.values(i, j) - eval(ecs, x.row(i).transpose(),
                                                                 x.row(j).transpose())));
  CHECK(worst == 0.0);
  // Independent formula.
  const auto naive = oracle::gram(x, x, [](const oracle::Vec& a, const oracle::Vec& b) {
    return oracle::exp_cos_sim(a, b, 0.2, 1e-6);
  });
  CHECK((gxx.values - naive).cwiseAbs().maxCoeff() < 1e-12 * naive.cwiseAbs().maxCoeff());

  const Vector diag = kernel_diagonal(ecs, x);
  for (Eigen::Index i = 0; i < 64; ++i) CHECK(diag[i] == gxx.values(i, i));

  set_num_threads(4);
  const GramMatrix g4 = gram(ecs, x, y);
  set_num_threads(1);
  CHECK(g4.values == gxy.values);
}

TEST_CASE("regularized_solve") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  Matrix b(5, 3);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(rng);

  SolveResult id = regularized_solve(Matrix::Identity(5, 5), b, 0.0);
  CHECK((id.solution - b).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_FALSE(id.least_squares);

  Vector d(5);
  d << 1, 2, 3, 4, 5;
  const SolveResult dg = regularized_solve(d.asDiagonal().toDenseMatrix(), b, 0.5);
  for (Eigen::Index r = 0; r < 5; ++r)
    for (Eigen::Index c = 0; c < 3; ++c)
      CHECK(dg.solution(r, c) == doctest::Approx(b(r, c) / (d[r] + 0.5)).epsilon(1e-14));

  Matrix a(32, 32);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  const Matrix spd = a * a.transpose() + Matrix::Identity(32, 32);
  Matrix rhs(32, 4);
  for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs.data()[i] = g(rng);
  const SolveResult s = regularized_solve(spd, rhs, 1e-3);
  const Matrix resid = (spd + 1e-3 * Matrix::Identity(32, 32)) * s.solution - rhs;
  CHECK(resid.cwiseAbs().maxCoeff() < 1e-8);
  const SolveResult again = regularized_solve(spd, rhs, 1e-3);
  CHECK(again.solution == s.solution);
}

TEST_CASE("regularized_solve escalates jitter and falls back") {
  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;  // eigenvalues 3 and -1
  Matrix b(2, 1);
  b << 1, 0;
  const SolveResult r = regularized_solve(indefinite, b, 0.0);
  CHECK((r.escalations > 0 || r.least_squares));
  CHECK(r.solution.allFinite());

  // Small negative eigenvalue: fixed by the step from 1e-4 to 1e-3.
  Matrix near(2, 2);
  near << 1, 0, 0, -5e-4;
  const SolveResult n = regularized_solve(near, b, 0.0);
  CHECK_FALSE(n.least_squares);
  CHECK(n.jitter == doctest::Approx(1e-3));
  CHECK(n.escalations == 2);  // 0 -> 1e-4 -> 1e-3

  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(regularized_solve(asym, b, 0.0), InvalidArgument);
  CHECK_THROWS_AS(regularized_solve(Matrix::Identity(2, 3), b, 0.0), InvalidArgument);
}
