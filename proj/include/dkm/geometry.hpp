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

// Coordinate systems shared by every stage of the matcher. Both images live
// in the normalized square [-1,1]x[-1,1]; pixel (r,c) of an HxW grid sits at
// (2(c+0.5)/W - 1, 2(r+0.5)/H - 1).

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dkm {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct GridShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t size() const { return height * width; }
  bool operator==(const GridShape&) const = default;
};

double pixel_to_normalized(double index, std::size_t extent);
double normalized_to_pixel(double coord, std::size_t extent);

/// Normalized coordinate of the center of pixel (row, col).
Vec2 pixel_center(std::size_t row, std::size_t col, GridShape shape);

struct NormalizedGrid {
  GridShape shape;
  std::vector<Vec2> coords;  // row-major

  std::size_t size() const { return coords.size(); }
  /// Spacing between neighbouring pixel centers along (x, y).
  Vec2 spacing() const;
};

NormalizedGrid make_grid(std::size_t height, std::size_t width);

/// Dense warp from query pixels to normalized support coordinates.
/// Flow is unconstrained until clip_to_grid.
struct WarpField {
  GridShape shape;
  std::vector<Vec2> flow;
  std::vector<double> confidence;

  WarpField() = default;
  explicit WarpField(GridShape s);

  std::size_t size() const { return flow.size(); }
  std::size_t index(std::size_t row, std::size_t col) const { return row * shape.width + col; }
};

/// Identity warp (flow = query grid) with the given confidence everywhere.
WarpField identity_warp(GridShape shape, double confidence = 1.0);

WarpField clip_to_grid(const WarpField& w);

/// Bilinear lookup of flow and confidence at a normalized query coordinate.
/// Coordinates outside the grid are clamped to the edge pixels.
Vec2 sample_flow(const WarpField& w, const Vec2& at);
double sample_confidence(const WarpField& w, const Vec2& at);

/// Bilinear resampling of a warp onto a different query grid.
WarpField resample_warp(const WarpField& w, GridShape target);

class Homography {
 public:
  Homography();  // identity
  /// Throws InvalidArgument when |det| <= 1e-12.
  explicit Homography(const Mat3& m);

  static Homography translation(double tx, double ty);

  const Mat3& matrix() const { return m_; }
  Homography inverse() const;

  /// Returns false (and leaves out untouched) when the homogeneous
  /// coordinate is below 1e-12 in magnitude.
  bool apply(const Vec2& x, Vec2& out) const;

 private:
  Mat3 m_;
};

/// compose(A, B) applies B first, then A.
Homography compose(const Homography& a, const Homography& b);

struct ProjectedPoints {
  std::vector<Vec2> points;
  std::vector<std::uint8_t> valid;  // 1 where the projection is defined
};

ProjectedPoints apply_homography(const Homography& h, std::span<const Vec2> coords);

/// Reference warp of a homography; confidence 1 where the image of the pixel
/// lies in [-1,1]^2, 0 elsewhere (and where the projection is undefined).
WarpField homography_to_warp(const Homography& h, const NormalizedGrid& grid);

struct CameraPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::UnitX();
};

/// Throws InvalidArgument unless R^T R = I and det R = 1 to the given tolerance.
void validate_rotation(const Mat3& r, double tol = 1e-9);
CameraPose make_pose(const Mat3& rotation, const Vec3& translation);

// DKWF warp-field files: "DKWF", u32 version, u32 height, u32 width, then
// height*width*(x, y, confidence) little-endian float32, row-major.
inline constexpr std::uint32_t kWarpFileVersion = 1;

void save_warp_file(const WarpField& w, const std::string& path);
WarpField load_warp_file(const std::string& path);

}  // namespace dkm
