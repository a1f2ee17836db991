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

#include "dkm/kernel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <string>

#include "dkm/error.hpp"
#include "dkm/parallel.hpp"

namespace dkm {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double exp_cos_from_dots(const KernelSpec& spec, double xy, double xx, double yy) {
  return std::exp(xy / (spec.tau * std::sqrt(xx * yy + spec.epsilon)));
}

double se_from_distance(const KernelSpec& spec, double d2) {
  return std::exp(-d2 / (spec.length * spec.length));
}

}  // namespace

KernelSpec KernelSpec::exp_cos_sim(double tau, double epsilon) {
  KernelSpec s;
  s.kind = KernelKind::ExpCosSim;
  s.tau = tau;
  s.epsilon = epsilon;
  s.validate();
  return s;
}

KernelSpec KernelSpec::squared_exponential(double length) {
  KernelSpec s;
  s.kind = KernelKind::SquaredExponential;
  s.length = length;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  if (kind == KernelKind::ExpCosSim) {
    if (!(tau >= 0.05 && tau <= 1.0))
      throw InvalidArgument("kernel: tau " + std::to_string(tau) + " outside [0.05, 1]");
    if (!(epsilon > 0.0)) throw InvalidArgument("kernel: epsilon must be > 0");
  } else if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("kernel: length must be > 0");
  }
}

double eval_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw InvalidArgument("eval_kernel: dimension mismatch " + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()));
  if (spec.kind == KernelKind::ExpCosSim)
    return exp_cos_from_dots(spec, dot(x.data(), y.data(), x.size()),
                             dot(x.data(), x.data(), x.size()), dot(y.data(), y.data(), y.size()));
  return se_from_distance(spec, squared_distance(x.data(), y.data(), x.size()));
}

GramMatrix gram(const KernelSpec& spec, const FeatureMatrix& x, const FeatureMatrix& y) {
  GramMatrix g;
  g.spec = spec;
  g.values.resize(x.rows(), y.rows());
  if (x.rows() == 0 || y.rows() == 0) return g;
  if (x.cols() != y.cols())
    throw InvalidArgument("gram: feature dimensions differ (" + std::to_string(x.cols()) +
                          " vs " + std::to_string(y.cols()) + ")");
  const auto n = static_cast<std::size_t>(x.cols());
  Vector xx(x.rows()), yy(y.rows());
  if (spec.kind == KernelKind::ExpCosSim) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) xx(i) = dot(x.row(i).data(), x.row(i).data(), n);
    for (Eigen::Index j = 0; j < y.rows(); ++j) yy(j) = dot(y.row(j).data(), y.row(j).data(), n);
  }
  parallel_for(static_cast<std::size_t>(x.rows()), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    const double* xi = x.row(i).data();
    for (Eigen::Index j = 0; j < y.rows(); ++j) {
      const double* yj = y.row(j).data();
      g.values(i, j) = spec.kind == KernelKind::ExpCosSim
                           ? exp_cos_from_dots(spec, dot(xi, yj, n), xx(i), yy(j))
                           : se_from_distance(spec, squared_distance(xi, yj, n));
    }
  });
  return g;
}

Vector kernel_diagonal(const KernelSpec& spec, const FeatureMatrix& x) {
  Vector d(x.rows());
  const auto n = static_cast<std::size_t>(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const std::span<const double> row(x.row(i).data(), n);
    d(i) = eval_kernel(spec, row, row);
  }
  return d;
}

SolveResult regularized_solve(const Matrix& k, const Matrix& b, double jitter) {
  if (k.rows() != k.cols())
    throw InvalidArgument("regularized_solve: K is " + std::to_string(k.rows()) + "x" +
                          std::to_string(k.cols()) + ", not square");
  if (b.rows() != k.rows())
    throw InvalidArgument("regularized_solve: right-hand side has " + std::to_string(b.rows()) +
                          " rows, expected " + std::to_string(k.rows()));
  if (!(jitter >= 0.0)) throw InvalidArgument("regularized_solve: jitter must be >= 0");
  if (k.size() > 0 && (k - k.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw InvalidArgument("regularized_solve: K is not symmetric");

  SolveResult result;
  double j = jitter;
  constexpr int kMaxEscalations = 4;
  for (int attempt = 0; attempt <= kMaxEscalations; ++attempt) {
    Matrix a = k;
    a.diagonal().array() += j;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() == Eigen::Success) {
      Matrix z = llt.solve(b);
      if (z.allFinite()) {
        result.solution = std::move(z);
        result.jitter = j;
        result.escalations = attempt;
        return result;
      }
    }
    if (attempt < kMaxEscalations) j = j > 0.0 ? j * 10.0 : 1e-4;
  }

  Matrix a = k;
  a.diagonal().array() += j;
  Matrix z = a.completeOrthogonalDecomposition().solve(b);
  if (!z.allFinite())
    throw NumericalFailure("regularized_solve: all fallbacks failed, final jitter " +
                               std::to_string(j),
                           j);
  result.solution = std::move(z);
  result.jitter = j;
  result.escalations = kMaxEscalations;
  result.least_squares = true;
  return result;
}

}  // namespace dkm
