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

#include "dkm/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dkm/error.hpp"
#include "dkm/parallel.hpp"

namespace dkm {

namespace {

void check_query(const SupportSet& support, const FeatureMatrix& query) {
  support.validate();
  if (query.rows() > 0 && query.cols() != support.features.cols())
    throw InvalidArgument("regressor: query features have " + std::to_string(query.cols()) +
                          " channels, support has " + std::to_string(support.features.cols()));
}

double log_kernel(const KernelSpec& spec, const double* x, const double* y, std::size_t n,
                  double xx, double yy) {
  if (spec.kind == KernelKind::ExpCosSim) {
    double xy = 0.0;
    for (std::size_t i = 0; i < n; ++i) xy += x[i] * y[i];
    return xy / (spec.tau * std::sqrt(xx * yy + spec.epsilon));
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    d2 += d * d;
  }
  return -d2 / (spec.length * spec.length);
}

}  // namespace

void SupportSet::validate() const {
  if (features.rows() == 0) throw InvalidArgument("support set is empty");
  if (features.rows() != targets.rows())
    throw InvalidArgument("support set: " + std::to_string(features.rows()) + " features but " +
                          std::to_string(targets.rows()) + " targets");
}

GPPosterior gp_posterior(const SupportSet& support, const FeatureMatrix& query,
                         const KernelSpec& spec, double jitter, GridShape query_shape) {
  check_query(support, query);
  spec.validate();
  const Eigen::Index n = support.features.rows();
  const Eigen::Index d = support.targets.cols();
  const GramMatrix kss = gram(spec, support.features, support.features);
  const GramMatrix kqs = gram(spec, query, support.features);

  Matrix rhs(n, d + query.rows());
  rhs.leftCols(d) = support.targets;
  rhs.rightCols(query.rows()) = kqs.values.transpose();
  const SolveResult solved = regularized_solve(kss.values, rhs, jitter);

  GPPosterior post;
  post.query_shape = query_shape;
  post.jitter = solved.jitter;
  post.least_squares = solved.least_squares;
  post.mean = kqs.values * solved.solution.leftCols(d);
  const Vector prior = kernel_diagonal(spec, query);
  post.variance.resize(query.rows());
  const auto reduction = solved.solution.rightCols(query.rows());
  for (Eigen::Index i = 0; i < query.rows(); ++i) {
    const double v = prior(i) - kqs.values.row(i).dot(reduction.col(i));
    post.variance(i) = std::max(v, 0.0);
  }
  return post;
}

RegressorOutput attach_variance_neighbourhood(const GPPosterior& post, std::size_t k) {
  if (k % 2 == 0) throw InvalidArgument("variance neighbourhood size must be odd");
  const GridShape g = post.query_shape;
  if (g.size() == 0 || g.size() != static_cast<std::size_t>(post.variance.size()))
    throw InvalidArgument("variance neighbourhood needs a posterior on a query grid");
  RegressorOutput out;
  out.embedding = post.mean;
  out.variance = post.variance;
  out.query_shape = g;
  const auto half = static_cast<long>(k / 2);
  out.variance_neighbourhood.resize(post.variance.size(), static_cast<Eigen::Index>(k * k));
  for (std::size_t r = 0; r < g.height; ++r) {
    for (std::size_t c = 0; c < g.width; ++c) {
      Eigen::Index col = 0;
      for (long dr = -half; dr <= half; ++dr) {
        for (long dc = -half; dc <= half; ++dc) {
          const long rr = std::clamp(static_cast<long>(r) + dr, 0L, static_cast<long>(g.height) - 1);
          const long cc = std::clamp(static_cast<long>(c) + dc, 0L, static_cast<long>(g.width) - 1);
          out.variance_neighbourhood(static_cast<Eigen::Index>(r * g.width + c), col++) =
              post.variance(rr * static_cast<long>(g.width) + cc);
        }
      }
    }
  }
  return out;
}

RegressorOutput kernel_smoother(const SupportSet& support, const FeatureMatrix& query,
                                const KernelSpec& spec, GridShape query_shape) {
  check_query(support, query);
  spec.validate();
  const Eigen::Index n = support.features.rows();
  const auto c = static_cast<std::size_t>(support.features.cols());
  Vector norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms(j) = support.features.row(j).squaredNorm();

  RegressorOutput out;
  out.query_shape = query_shape;
  out.embedding.resize(query.rows(), support.targets.cols());
  parallel_for(static_cast<std::size_t>(query.rows()), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    const double qq = query.row(i).squaredNorm();
    Vector logw(n);
    for (Eigen::Index j = 0; j < n; ++j)
      logw(j) = log_kernel(spec, query.row(i).data(), support.features.row(j).data(), c, qq,
                           norms(j));
    // Subtracting the max log-weight leaves the normalized weights unchanged.
    const double top = logw.maxCoeff();
    const Vector w = (logw.array() - top).exp().matrix();
    out.embedding.row(i) = (w.transpose() * support.targets) / w.sum();
  });
  return out;
}

std::vector<std::size_t> nearest_neighbour_indices(const FeatureMatrix& support,
                                                   const FeatureMatrix& query,
                                                   NeighbourMetric metric) {
  if (support.rows() == 0) throw InvalidArgument("nearest_neighbour: empty support");
  if (query.rows() > 0 && query.cols() != support.cols())
    throw InvalidArgument("nearest_neighbour: feature dimensions differ");
  Vector norms(support.rows());
  for (Eigen::Index j = 0; j < support.rows(); ++j) norms(j) = support.row(j).norm();
  std::vector<std::size_t> best(static_cast<std::size_t>(query.rows()), 0);
  parallel_for(best.size(), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    const double qn = query.row(i).norm();
    double best_score = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < support.rows(); ++j) {
      double score;
      if (metric == NeighbourMetric::Cosine) {
        const double denom = qn * norms(j);
        score = denom > 0.0 ? query.row(i).dot(support.row(j)) / denom : 0.0;
      } else {
        score = -(query.row(i) - support.row(j)).squaredNorm();
      }
      if (score > best_score) {
        best_score = score;
        best[ui] = static_cast<std::size_t>(j);
      }
    }
  });
  return best;
}

RegressorOutput nearest_neighbour(const SupportSet& support, const FeatureMatrix& query,
                                  NeighbourMetric metric, GridShape query_shape) {
  check_query(support, query);
  const auto idx = nearest_neighbour_indices(support.features, query, metric);
  RegressorOutput out;
  out.query_shape = query_shape;
  out.embedding.resize(query.rows(), support.targets.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.embedding.row(static_cast<Eigen::Index>(i)) =
        support.targets.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

}  // namespace dkm
