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

// Non-learned decoding: embedded coordinates -> natural coordinates by
// correlating against the embedded grid, then coherence filtering,
// confidence estimation, sub-cell refinement and match filtering.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dkm/embedding.hpp"
#include "dkm/features.hpp"
#include "dkm/geometry.hpp"
#include "dkm/regress.hpp"

namespace dkm {

struct Mode {
  Vec2 coord;
  double score = 0.0;
};

/// Up to max_modes modes per query point, sorted by descending score.
struct ModeSet {
  std::vector<std::vector<Mode>> modes;
};

struct DecodeParams {
  /// Non-max-suppression radius in normalized units; defaults to 3 grid cells.
  std::optional<double> nms_radius;
  std::size_t max_modes = 4;
  /// Soft-argmax temperature on peak-normalized correlation scores.
  double temperature = 0.05;
  /// Soft-argmax half-window in grid cells. Near the border the window reaches
  /// past [-1,1]^2 onto extrapolated grid points, so it stays symmetric about
  /// the peak. The estimate never leaves the cell of the discrete peak.
  std::size_t window = 2;
  /// Modes scoring below this fraction of the top mode are discarded.
  double min_mode_ratio = 0.2;
};

struct DecodeResult {
  WarpField warp;                     // flow = refined top mode
  ModeSet modes;
  std::vector<double> scores;         // top-mode correlation / mean grid embedding norm
  std::vector<std::uint8_t> degenerate;  // 1 where the prediction was all zero
};

/// Correlation of one predicted embedding against every embedded grid point.
/// channel_decode passes unit-normalized grid embeddings.
std::vector<double> correlation_profile(const Vector& prediction, const Matrix& embedded_grid);

DecodeResult channel_decode(const RegressorOutput& pred, const EmbeddingBasis& basis,
                            const NormalizedGrid& grid, const DecodeParams& params = {});

/// Confidence- and proximity-weighted bilateral average of each flow vector
/// over a (2 radius + 1)^2 neighbourhood; confidence is left unchanged.
WarpField coherence_filter(const WarpField& w, std::size_t radius, double spatial_ell,
                           double flow_ell);

struct ConfidenceCalibration {
  double a = 6.0;
  double b = 3.0;
};

/// logistic(a * score/max(score) - b * variance/max(variance)), clamped to [0,1].
/// An empty variance field counts as zero variance.
std::vector<double> confidence_estimate(const std::vector<double>& variance,
                                        const std::vector<double>& scores,
                                        ConfidenceCalibration calib = {});

struct RefineStats {
  std::size_t updated = 0;
  std::size_t flat = 0;
  std::size_t clamped = 0;
};

/// Local feature-correlation search around the current match of every query
/// cell: an integer lattice of +-window support cells, then step-halving
/// passes and a quadratic fit on the final 3x3 neighbourhood. The flow change
/// is bounded by window support cells. Textureless cells keep their flow and
/// have their confidence halved, as do matches that land outside the support
/// map.
WarpField refine_subpixel(const WarpField& w, const FeatureMap& query_features,
                          const FeatureMap& support_features, std::size_t window,
                          RefineStats* stats = nullptr);

/// 1 where warping query -> support -> query returns within threshold
/// (normalized units) of the start; bilinear lookup into w_sq. Matches that
/// leave the support image are 0.
std::vector<std::uint8_t> mutual_consistency_filter(const WarpField& w_qs, const WarpField& w_sq,
                                                    double threshold);

struct Match {
  Vec2 query;
  Vec2 support;
  double confidence = 0.0;
};

/// The k most confident matches, ties broken by row-major query index.
std::vector<Match> sparsify_topk(const WarpField& w, std::size_t k);

/// "qx qy sx sy conf" per line, 9 significant digits.
void save_matches(const std::vector<Match>& matches, const std::string& path);
std::vector<Match> load_matches(const std::string& path);

}  // namespace dkm
