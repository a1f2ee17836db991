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

// Synthetic evaluation: the 1-D toy regression problem, homography pairs
// with photometric distortion, RANSAC homography fitting, and the benchmark
// runner built on them.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dkm/config.hpp"
#include "dkm/decode.hpp"
#include "dkm/features.hpp"
#include "dkm/geometry.hpp"

namespace dkm {

// ---------------------------------------------------------------------------
// Toy problem: p(x,y) = w1 N(y; x, v) U[0,0.5](x) + w2 N(y; -x, v) U[0.4,1](x)

struct ToyConfig {
  std::size_t n = 100;
  double kernel_length = 0.1;
  double weight_first = 0.8;
  double weight_second = 0.2;
  double noise_variance = 0.1;
  double jitter = 1e-2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ToySample {
  double x;
  double y;
  int branch;  // 1 or 2
};

std::vector<ToySample> toy_sample(const ToyConfig& cfg);

struct ToyCurves {
  std::vector<double> x;
  std::vector<double> gp_mean;
  std::vector<double> gp_var;
  std::vector<double> attention;
  std::vector<double> nearest;
  std::vector<std::size_t> support_count;  // samples whose nearest query point is x
};

inline constexpr std::size_t kToyQueryPoints = 512;

/// Evaluates the GP, kernel smoother and nearest neighbour on 512 uniform
/// points of [0,1].
ToyCurves toy_run(std::span<const ToySample> samples, const ToyConfig& cfg);

/// CSV with header "x,gp_mean,gp_var,attn,nn,support".
void write_toy_csv(const ToyCurves& curves, const std::string& path);
std::string toy_csv(const ToyCurves& curves);

/// Width of the x-interval over which a curve crosses from the +x branch to
/// the -x branch. With u = pred/x and x_c the first x in [0.35, 0.8] where
/// u < 0, the width runs from the last x <= x_c with u >= level to the first
/// x >= x_c with u <= -level. The default level 0.8 is the 10-90 % rise
/// distance between the two branches. Infinity when either end is missing.
double transition_width(const std::vector<double>& x, const std::vector<double>& pred,
                        double level = 0.8);
/// RMSE of pred against y = x over query points with x in [lo, hi].
double branch_rmse(const std::vector<double>& x, const std::vector<double>& pred, double lo,
                   double hi);

// ---------------------------------------------------------------------------
// Synthetic homography pairs

/// Multi-octave value noise in [0,1].
Image procedural_texture(std::size_t height, std::size_t width, std::uint64_t seed);

struct SynthPairConfig {
  double max_rotation_deg = 15.0;
  double min_scale = 0.85;
  double max_scale = 1.2;
  double max_translation = 0.15;
  double max_perspective = 0.02;
  double min_brightness = -0.1, max_brightness = 0.1;
  double min_contrast = 0.8, max_contrast = 1.2;
  double min_gamma = 0.8, max_gamma = 1.25;
  double noise_std = 0.01;

  void validate() const;
};

struct SynthPair {
  Image warped;      // support image
  Homography h;      // query normalized -> support normalized
  WarpField reference;  // at the query pixel grid
};

Homography sample_homography(const SynthPairConfig& cfg, std::uint64_t seed);

/// Warps img by a sampled homography (bilinear, zero outside), applies
/// clip(gain x^gamma + bias) plus Gaussian noise.
SynthPair synth_pair(const Image& img, const SynthPairConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Homography estimation

/// Normalized DLT on >= 4 correspondences mapping src to dst.
Homography dlt_homography(std::span<const Vec2> src, std::span<const Vec2> dst);

struct RansacResult {
  Homography h;
  std::vector<std::uint8_t> inliers;
  std::size_t inlier_count = 0;
};

/// Best-of-N minimal-sample DLT hypotheses scored by inlier count under the
/// symmetric transfer error |s - Hq|^2 + |q - H^-1 s|^2 < thresh^2 (normalized
/// units), then a DLT refit on the inliers. Throws EstimationFailure with fewer than 4 matches or
/// no hypothesis with 4 inliers.
RansacResult ransac_homography(std::span<const Match> matches, std::size_t iterations,
                               double inlier_thresh, std::uint64_t seed);

/// Mean distance in support pixels between the images of the four corners.
double corner_error_px(const Homography& estimate, const Homography& truth, GridShape pixels);

// ---------------------------------------------------------------------------
// Benchmark

enum class BenchPipeline { Matcher, Oracle, Identity };

struct BenchmarkConfig {
  std::size_t pairs = 20;
  std::size_t image_size = 256;
  SynthPairConfig synth;
  BenchPipeline pipeline = BenchPipeline::Matcher;
  std::size_t topk = 2000;
  std::size_t ransac_iterations = 1000;
  double ransac_thresh_px = 3.0;
  std::uint64_t seed = 0;
};

struct PairReport {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double pck1 = 0, pck3 = 0, pck5 = 0, aepe = 0;
  double homography_error_px = 0;
  bool homography_ok = false;
  double mean_confidence = 0;
};

struct BenchmarkReport {
  std::vector<PairReport> pairs;
  std::size_t failures = 0;
  double mean_pck1 = 0, mean_pck3 = 0, mean_pck5 = 0, mean_aepe = 0;
  double median_pck1 = 0, median_pck3 = 0, median_pck5 = 0, median_aepe = 0;
  double median_homography_error_px = 0;
};

/// Evaluates one pipeline on cfg.pairs synthetic pairs. Source images cycle
/// through `images`; procedural textures are generated when it is empty.
/// Per-pair failures are recorded, not thrown.
BenchmarkReport run_benchmark(std::span<const Image> images, const BenchmarkConfig& cfg,
                              const PipelineConfig& pipeline);

/// Writes pairs.csv and summary.txt into dir (created if missing).
void write_benchmark_report(const BenchmarkReport& report, const BenchmarkConfig& cfg,
                            const PipelineConfig& pipeline, const std::string& dir);

}  // namespace dkm
