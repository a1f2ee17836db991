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

// End-to-end dense matcher: features -> regression onto embedded support
// coordinates -> channel decoding -> scale fusion -> coherence -> refinement.

#include <cstddef>
#include <map>

#include "dkm/config.hpp"
#include "dkm/decode.hpp"
#include "dkm/features.hpp"

namespace dkm {

struct MatchSummary {
  double mean_confidence = 0.0;
  double mean_modes = 0.0;           // modes per query at the finest regression stride
  double multimodal_fraction = 0.0;  // fraction of queries with more than one mode
  std::size_t degenerate = 0;
  std::size_t least_squares_solves = 0;
  double max_jitter = 0.0;
};

struct MatchResult {
  WarpField warp;            // at the finest stride used
  std::size_t stride = 0;
  GridShape query_pixels;
  GridShape support_pixels;
  MatchSummary summary;
};

/// Feature maps for one image, keyed by stride.
class FeaturePyramid {
 public:
  FeaturePyramid(const Image& img, const DescriptorParams& params = {})
      : image_(&img), params_(params) {}
  const FeatureMap& at(std::size_t stride);

 private:
  const Image* image_;
  DescriptorParams params_;
  std::map<std::size_t, FeatureMap> maps_;
};

/// Regression plus decoding at one stride; returns a warp on the query map's grid.
WarpField regress_and_decode(const FeatureMap& query, const FeatureMap& support,
                             const EmbeddingBasis& basis, const PipelineConfig& cfg,
                             MatchSummary* summary = nullptr);

MatchResult match_images(const Image& query, const Image& support, const PipelineConfig& cfg);

/// Single-stride matching of precomputed feature maps. Refinement runs at the
/// maps' own stride only when refine_strides lists it.
MatchResult match_features(const FeatureMap& query, const FeatureMap& support,
                           const PipelineConfig& cfg);

EmbeddingBasis pipeline_basis(const PipelineConfig& cfg);

}  // namespace dkm
