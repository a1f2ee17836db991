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

// Regressors from query features to embedded support coordinates: the GP
// posterior mean, the kernel smoother (cross-attention), and nearest neighbour.

#include <cstddef>
#include <vector>

#include "dkm/geometry.hpp"
#include "dkm/kernel.hpp"

namespace dkm {

struct SupportSet {
  FeatureMatrix features;  // N x C
  Matrix targets;          // N x D embedded coordinates
  GridShape shape;         // grid the support points were taken from, if any

  /// Throws InvalidArgument for an empty set or mismatched counts.
  void validate() const;
};

struct GPPosterior {
  Matrix mean;         // Q x D
  Vector variance;     // diagonal of the posterior covariance, clamped at 0
  GridShape query_shape;
  double jitter = 0.0; // jitter actually used by the solve
  bool least_squares = false;
};

struct RegressorOutput {
  Matrix embedding;                 // Q x D
  Vector variance;                  // empty when the regressor has none
  Matrix variance_neighbourhood;    // Q x k^2, empty unless attached
  GridShape query_shape;
};

/// mu = K_qs (K_ss + jI)^-1 E_s and diag(K_qq - K_qs (K_ss + jI)^-1 K_sq),
/// sharing one factorization across every output column.
GPPosterior gp_posterior(const SupportSet& support, const FeatureMatrix& query,
                         const KernelSpec& spec, double jitter, GridShape query_shape = {});

/// Appends the k x k spatial neighbourhood of the variance field (edge
/// replicated, row-major) to every point. k must be odd and the posterior
/// must carry a query grid.
RegressorOutput attach_variance_neighbourhood(const GPPosterior& post, std::size_t k = 5);

/// Normalized kernel-weighted average of the support targets.
RegressorOutput kernel_smoother(const SupportSet& support, const FeatureMatrix& query,
                                const KernelSpec& spec, GridShape query_shape = {});

enum class NeighbourMetric { Cosine, Euclidean };

/// Index of the best support feature per query; ties go to the lowest index.
std::vector<std::size_t> nearest_neighbour_indices(const FeatureMatrix& support,
                                                   const FeatureMatrix& query,
                                                   NeighbourMetric metric);

RegressorOutput nearest_neighbour(const SupportSet& support, const FeatureMatrix& query,
                                  NeighbourMetric metric, GridShape query_shape = {});

}  // namespace dkm
