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

// Dense hand-crafted descriptors standing in for a learned backbone, plus
// the image and feature-map file formats.

#include <cstdint>
#include <string>
#include <vector>

#include "dkm/geometry.hpp"
#include "dkm/kernel.hpp"

namespace dkm {

/// Pixel values in [0,1], channels interleaved, row-major.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<double> values;

  Image() = default;
  Image(std::size_t h, std::size_t w, std::size_t c = 1)
      : height(h), width(w), channels(c), values(h * w * c, 0.0) {}

  double& at(std::size_t r, std::size_t c, std::size_t ch = 0) {
    return values[(r * width + c) * channels + ch];
  }
  double at(std::size_t r, std::size_t c, std::size_t ch = 0) const {
    return values[(r * width + c) * channels + ch];
  }
  /// Channel mean at a pixel.
  double gray(std::size_t r, std::size_t c) const;
};

/// Binary PGM (P5) or PPM (P6), 8- or 16-bit.
Image load_image(const std::string& path);
/// Writes P5 (1 channel) or P6 (3 channels) with maxval 255.
void save_image(const Image& img, const std::string& path);

struct FeatureMap {
  std::size_t height = 0;  // cells
  std::size_t width = 0;   // cells
  std::size_t channels = 0;
  std::size_t stride = 1;  // pixels per cell
  bool normalized = false;
  FeatureMatrix values;    // (height*width) x channels, row-major cells

  GridShape shape() const { return {height, width}; }
  bool is_zero_cell(std::size_t cell) const;
};

struct DescriptorParams {
  /// Weight of the intensity pyramid relative to the orientation histograms
  /// (each part is L2-normalized before weighting).
  double pyramid_weight = 0.6;
};

inline constexpr std::size_t kOrientationBins = 8;
inline constexpr std::size_t kHistogramChannels = 4 * 4 * kOrientationBins;  // 128
inline constexpr std::size_t kPyramidChannels = 1 + 4 + 16;                  // 21
inline constexpr std::size_t kDescriptorChannels = kHistogramChannels + kPyramidChannels;

/// One descriptor per stride x stride cell: unsigned-orientation histograms
/// over a 4x4 layout of stride-sized blocks spanning a (4 stride)^2 window,
/// then a 3-level pyramid of mean-removed intensities over the same window.
/// Values are rounded to float precision so they survive a DKFM round trip.
/// Throws InvalidArgument when the image is smaller than 2 stride.
FeatureMap extract_dense_descriptors(const Image& img, std::size_t stride,
                                     const DescriptorParams& params = {});

// DKFM files: "DKFM", u32 version, u32 height, u32 width, u32 channels,
// u32 stride, u8 normalized, 3 pad bytes, then H*W*C float32 (channel fastest).
inline constexpr std::uint32_t kFeatureFileVersion = 1;
void save_feature_file(const FeatureMap& fm, const std::string& path);
FeatureMap load_feature_file(const std::string& path);

/// Bilinear sample of the feature map at a normalized coordinate with edge
/// clamping. Returns true when the coordinate needed clamping.
bool sample_features(const FeatureMap& fm, const Vec2& at, double* out);

}  // namespace dkm
