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

#pragma once

#include <Eigen/Core>
#include <span>

namespace dkm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// One feature vector per row.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class KernelKind { ExpCosSim, SquaredExponential };

/// K(x,y) = exp(<x,y> / (tau sqrt(<x,x><y,y> + eps)))   (ExpCosSim)
/// K(x,y) = exp(-|x-y|^2 / length^2)                   (SquaredExponential)
struct KernelSpec {
  KernelKind kind = KernelKind::ExpCosSim;
  double tau = 0.2;
  double epsilon = 1e-6;
  double length = 0.1;

  /// Throws InvalidArgument unless tau is in [0.05, 1] and epsilon > 0.
  static KernelSpec exp_cos_sim(double tau = 0.2, double epsilon = 1e-6);
  static KernelSpec squared_exponential(double length = 0.1);

  void validate() const;
};

double eval_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

struct GramMatrix {
  Matrix values;
  KernelSpec spec;
  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// Entry (i,j) = eval_kernel(spec, X_i, Y_j), bit-identical for any thread count.
GramMatrix gram(const KernelSpec& spec, const FeatureMatrix& x, const FeatureMatrix& y);

/// k(x_i, x_i) for every row.
Vector kernel_diagonal(const KernelSpec& spec, const FeatureMatrix& x);

struct SolveResult {
  Matrix solution;
  double jitter = 0.0;        // jitter of the successful (or final) attempt
  int escalations = 0;        // number of x10 jitter increases
  bool least_squares = false; // true when the Cholesky route gave up
};

/// Solves (K + jitter I) Z = B with a Cholesky factorization. On failure the
/// jitter grows x10 up to four times (from 1e-4 when it starts at zero), then
/// a least-squares solve is used and flagged. Throws NumericalFailure when
/// even that yields non-finite values, InvalidArgument for a non-square or
/// asymmetric K.
SolveResult regularized_solve(const Matrix& k, const Matrix& b, double jitter);

}  // namespace dkm
