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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dkm/embedding.hpp"
#include "dkm/regress.hpp"

namespace dkm {

enum class RegressorKind { GP, Attention, NearestNeighbour };

const char* to_string(RegressorKind kind);

/// Every switch of the matching pipeline. Text form is one "key = value"
/// per line; see PipelineConfig::keys() for the accepted keys.
struct PipelineConfig {
  RegressorKind regressor = RegressorKind::GP;
  BasisKind embedding = BasisKind::Fourier;
  std::size_t dimension = 256;
  double ell = 10.0;

  double tau = 0.2;
  double epsilon = 1e-6;
  double jitter = 1e-4;
  NeighbourMetric nn_metric = NeighbourMetric::Cosine;
  std::size_t variance_neighbourhood = 5;

  /// Strides at which a regressor is run, fused coarse to fine.
  std::vector<std::size_t> strides{32, 16};
  /// Strides at which the warp is refined after decoding, in order. Refining
  /// at a regression stride itself snaps sub-cell estimates back to cell centers.
  std::vector<std::size_t> refine_strides{8, 4};
  std::size_t refine_window = 2;
  double fusion_threshold = 0.5;

  bool coherence = true;
  std::size_t coherence_radius = 2;
  double coherence_spatial_cells = 1.0;
  double coherence_flow_ell = 0.1;

  std::size_t decode_upsample = 4;
  double nms_radius_cells = 3.0;
  std::size_t max_modes = 4;
  double temperature = 0.05;
  std::size_t softargmax_window = 2;
  double min_mode_ratio = 0.2;
  double conf_a = 6.0;
  double conf_b = 3.0;

  std::uint64_t seed = 0;

  /// Throws ConfigError naming the key or value on failure.
  void set(const std::string& key, const std::string& value);
  /// Applies "key = value" lines; '#' starts a comment.
  void apply_text(const std::string& text, const std::string& origin = "<text>");
  void load_file(const std::string& path);
  std::string to_text() const;
  void validate() const;

  static const std::vector<std::string>& keys();
};

/// Independent sub-stream seed derived from the master seed and a name
/// ("basis", "homography", "ransac", "noise", ...).
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name);

}  // namespace dkm
