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

#include "dkm/geometry.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "dkm/error.hpp"

namespace dkm {

double pixel_to_normalized(double index, std::size_t extent) {
  return 2.0 * (index + 0.5) / static_cast<double>(extent) - 1.0;
}

double normalized_to_pixel(double coord, std::size_t extent) {
  return (coord + 1.0) * 0.5 * static_cast<double>(extent) - 0.5;
}

Vec2 pixel_center(std::size_t row, std::size_t col, GridShape shape) {
  return {pixel_to_normalized(static_cast<double>(col), shape.width),
          pixel_to_normalized(static_cast<double>(row), shape.height)};
}

Vec2 NormalizedGrid::spacing() const {
  return {2.0 / static_cast<double>(shape.width), 2.0 / static_cast<double>(shape.height)};
}

NormalizedGrid make_grid(std::size_t height, std::size_t width) {
  if (height == 0 || width == 0)
    throw InvalidArgument("make_grid: zero dimension " + std::to_string(height) + "x" +
                          std::to_string(width));
  NormalizedGrid g;
  g.shape = {height, width};
  g.coords.reserve(height * width);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) g.coords.push_back(pixel_center(r, c, g.shape));
  return g;
}

WarpField::WarpField(GridShape s)
    : shape(s), flow(s.size(), Vec2::Zero()), confidence(s.size(), 0.0) {}

WarpField identity_warp(GridShape shape, double confidence) {
  WarpField w(shape);
  for (std::size_t r = 0; r < shape.height; ++r)
    for (std::size_t c = 0; c < shape.width; ++c) w.flow[w.index(r, c)] = pixel_center(r, c, shape);
  std::fill(w.confidence.begin(), w.confidence.end(), confidence);
  return w;
}

WarpField clip_to_grid(const WarpField& w) {
  WarpField out = w;
  for (auto& f : out.flow) {
    f.x() = std::clamp(f.x(), -1.0, 1.0);
    f.y() = std::clamp(f.y(), -1.0, 1.0);
  }
  return out;
}

namespace {

struct BilinearTap {
  std::size_t r0, r1, c0, c1;
  double fy, fx;
};

BilinearTap bilinear_tap(GridShape shape, const Vec2& at) {
  const double u = std::clamp(normalized_to_pixel(at.x(), shape.width), 0.0,
                              static_cast<double>(shape.width - 1));
  const double v = std::clamp(normalized_to_pixel(at.y(), shape.height), 0.0,
                              static_cast<double>(shape.height - 1));
  BilinearTap t;
  t.c0 = static_cast<std::size_t>(std::floor(u));
  t.r0 = static_cast<std::size_t>(std::floor(v));
  t.c1 = std::min(t.c0 + 1, shape.width - 1);
  t.r1 = std::min(t.r0 + 1, shape.height - 1);
  t.fx = u - static_cast<double>(t.c0);
  t.fy = v - static_cast<double>(t.r0);
  return t;
}

template <typename T>
T blend(const std::vector<T>& values, std::size_t width, const BilinearTap& t) {
  const T top = values[t.r0 * width + t.c0] * (1.0 - t.fx) + values[t.r0 * width + t.c1] * t.fx;
  const T bottom = values[t.r1 * width + t.c0] * (1.0 - t.fx) + values[t.r1 * width + t.c1] * t.fx;
  return top * (1.0 - t.fy) + bottom * t.fy;
}

}  // namespace

Vec2 sample_flow(const WarpField& w, const Vec2& at) {
  return blend(w.flow, w.shape.width, bilinear_tap(w.shape, at));
}

double sample_confidence(const WarpField& w, const Vec2& at) {
  return blend(w.confidence, w.shape.width, bilinear_tap(w.shape, at));
}

WarpField resample_warp(const WarpField& w, GridShape target) {
  if (w.shape == target) return w;
  WarpField out(target);
  for (std::size_t r = 0; r < target.height; ++r) {
    for (std::size_t c = 0; c < target.width; ++c) {
      const BilinearTap t = bilinear_tap(w.shape, pixel_center(r, c, target));
      out.flow[out.index(r, c)] = blend(w.flow, w.shape.width, t);
      out.confidence[out.index(r, c)] = blend(w.confidence, w.shape.width, t);
    }
  }
  return out;
}

Homography::Homography() : m_(Mat3::Identity()) {}

Homography::Homography(const Mat3& m) : m_(m) {
  if (!m_.allFinite()) throw InvalidArgument("homography: non-finite entries");
  if (std::abs(m_(2, 2)) > 1e-12) m_ /= m_(2, 2);
  const double det = m_.determinant();
  if (!(std::abs(det) > 1e-12)) throw InvalidArgument("homography: not invertible");
}

Homography Homography::translation(double tx, double ty) {
  Mat3 m = Mat3::Identity();
  m(0, 2) = tx;
  m(1, 2) = ty;
  return Homography(m);
}

Homography Homography::inverse() const { return Homography(m_.inverse()); }

bool Homography::apply(const Vec2& x, Vec2& out) const {
  const Vec3 p = m_ * Vec3(x.x(), x.y(), 1.0);
  if (!(std::abs(p.z()) >= 1e-12)) return false;
  out = p.head<2>() / p.z();
  return true;
}

Homography compose(const Homography& a, const Homography& b) {
  return Homography(a.matrix() * b.matrix());
}

ProjectedPoints apply_homography(const Homography& h, std::span<const Vec2> coords) {
  ProjectedPoints out;
  out.points.resize(coords.size(), Vec2::Zero());
  out.valid.resize(coords.size(), 0);
  for (std::size_t i = 0; i < coords.size(); ++i)
    out.valid[i] = h.apply(coords[i], out.points[i]) ? 1 : 0;
  return out;
}

WarpField homography_to_warp(const Homography& h, const NormalizedGrid& grid) {
  WarpField w(grid.shape);
  const ProjectedPoints p = apply_homography(h, grid.coords);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    w.flow[i] = p.points[i];
    const bool inside = p.valid[i] && std::abs(p.points[i].x()) <= 1.0 &&
                        std::abs(p.points[i].y()) <= 1.0;
    w.confidence[i] = inside ? 1.0 : 0.0;
  }
  return w;
}

void validate_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) throw InvalidArgument("rotation: non-finite entries");
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > tol) throw InvalidArgument("rotation: R^T R deviates from identity by " +
                                         std::to_string(ortho));
  const double det = r.determinant();
  if (std::abs(det - 1.0) > tol)
    throw InvalidArgument("rotation: determinant " + std::to_string(det) + " != 1");
}

CameraPose make_pose(const Mat3& rotation, const Vec3& translation) {
  validate_rotation(rotation);
  if (!translation.allFinite() || translation.norm() == 0.0)
    throw InvalidArgument("pose: translation must be finite and nonzero");
  return {rotation, translation};
}

}  // namespace dkm
