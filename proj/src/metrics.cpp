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

#include "dkm/metrics.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <string>

#include "dkm/error.hpp"

namespace dkm {

std::vector<double> ErrorSample::valid_errors() const {
  std::vector<double> out;
  out.reserve(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (valid.empty() || valid[i]) out.push_back(errors[i]);
  return out;
}

ErrorSample endpoint_errors(const WarpField& pred, const WarpField& ref,
                            std::span<const std::uint8_t> mask, GridShape support_pixels) {
  if (pred.shape != ref.shape) throw InvalidArgument("metrics: warp shapes differ");
  if (!mask.empty() && mask.size() != pred.size()) throw InvalidArgument("metrics: mask size");
  if (support_pixels.size() == 0) throw InvalidArgument("metrics: empty support image size");
  const double sx = 0.5 * static_cast<double>(support_pixels.width);
  const double sy = 0.5 * static_cast<double>(support_pixels.height);
  ErrorSample e;
  e.errors.resize(pred.size());
  e.valid.assign(mask.begin(), mask.end());
  if (e.valid.empty()) e.valid.assign(pred.size(), 1);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double dx = (pred.flow[i].x() - ref.flow[i].x()) * sx;
    const double dy = (pred.flow[i].y() - ref.flow[i].y()) * sy;
    e.errors[i] = std::sqrt(dx * dx + dy * dy);
  }
  return e;
}

std::vector<std::uint8_t> reference_mask(const WarpField& ref) {
  std::vector<std::uint8_t> m(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) m[i] = ref.confidence[i] > 0.5 ? 1 : 0;
  return m;
}

double precision_below(const ErrorSample& e, double tau) {
  const std::vector<double> v = e.valid_errors();
  if (v.empty()) throw UndefinedResult("precision: no valid samples");
  const auto hits = std::count_if(v.begin(), v.end(), [&](double x) { return x < tau; });
  return static_cast<double>(hits) / static_cast<double>(v.size());
}

double pck(const WarpField& pred, const WarpField& ref, std::span<const std::uint8_t> mask,
           double tau_px, GridShape support_pixels) {
  if (!(tau_px > 0.0)) throw InvalidArgument("pck: tau must be > 0");
  return precision_below(endpoint_errors(pred, ref, mask, support_pixels), tau_px);
}

double aepe(const WarpField& pred, const WarpField& ref, std::span<const std::uint8_t> mask,
            GridShape support_pixels) {
  const std::vector<double> v = endpoint_errors(pred, ref, mask, support_pixels).valid_errors();
  if (v.empty()) throw UndefinedResult("aepe: no valid samples");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

PrecisionCurve precision_curve(const ErrorSample& e, std::span<const double> thresholds) {
  PrecisionCurve c;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
      throw InvalidArgument("precision_curve: thresholds must be strictly increasing");
    c.thresholds.push_back(thresholds[i]);
    c.precision.push_back(precision_below(e, thresholds[i]));
  }
  return c;
}

double auc(const ErrorSample& e, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("auc: alpha must be > 0");
  std::vector<double> v = e.valid_errors();
  if (v.empty()) throw UndefinedResult("auc: no valid samples");
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());

  std::vector<double> xs{0.0};
  std::vector<double> ys{static_cast<double>(std::upper_bound(v.begin(), v.end(), 0.0) - v.begin()) / n};
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > alpha) break;
    if (v[i] <= 0.0) continue;
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;  // keep the last of equal errors
    xs.push_back(v[i]);
    ys.push_back(static_cast<double>(i + 1) / n);
  }
  xs.push_back(alpha);
  ys.push_back(ys.back());

  double area = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) area += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
  return area / alpha;
}

double map_at(const ErrorSample& e, double alpha_deg) {
  if (alpha_deg != 5.0 && alpha_deg != 10.0 && alpha_deg != 20.0)
    throw InvalidArgument("map_at: alpha must be 5, 10 or 20 degrees, got " +
                          std::to_string(alpha_deg));
  double s = 0.0;
  int count = 0;
  for (double t : {5.0, 10.0, 20.0}) {
    if (t > alpha_deg) break;
    s += precision_below(e, t);
    ++count;
  }
  return s / count;
}

double rotation_error(const Mat3& r, const Mat3& r_hat) {
  validate_rotation(r, 1e-6);
  validate_rotation(r_hat, 1e-6);
  const double c = std::clamp(((r.transpose() * r_hat).trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::abs(std::acos(c));
}

double translation_error(const Vec3& t, const Vec3& t_hat) {
  const double nt = t.norm(), nh = t_hat.norm();
  if (!(nt > 0.0) || !(nh > 0.0)) throw InvalidArgument("translation_error: zero translation");
  const double c = std::clamp(std::abs(t.dot(t_hat)) / (nt * nh), -1.0, 1.0);
  return std::acos(c);
}

double pose_error(const Mat3& r, const Vec3& t, const Mat3& r_hat, const Vec3& t_hat) {
  return std::max(rotation_error(r, r_hat), translation_error(t, t_hat));
}

double warp_loss(const WarpField& pred, const WarpField& ref, std::span<const double> p) {
  if (pred.shape != ref.shape || p.size() != pred.size())
    throw InvalidArgument("warp_loss: shapes differ");
  if (pred.size() == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += p[i] * (pred.flow[i] - ref.flow[i]).norm();
  return s / static_cast<double>(pred.size());
}

double conf_loss(std::span<const double> p_hat, std::span<const double> p) {
  if (p_hat.size() != p.size()) throw InvalidArgument("conf_loss: sizes differ");
  if (p.empty()) return 0.0;
  constexpr double kClamp = 1e-7;
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = std::clamp(p_hat[i], kClamp, 1.0 - kClamp);
    s -= p[i] * std::log(q) + (1.0 - p[i]) * std::log(1.0 - q);
  }
  return s / static_cast<double>(p.size());
}

double total_loss(const std::vector<ScaleTerm>& scales, double coarse_gate_cells) {
  double total = 0.0;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const ScaleTerm& s = scales[k];
    std::vector<double> p = s.p;
    if (k > 0) {
      const ScaleTerm& coarse = scales[k - 1];
      const double cell = 2.0 / static_cast<double>(
                                    std::min(coarse.pred.shape.width, coarse.pred.shape.height));
      const double gate = coarse_gate_cells * cell;
      for (std::size_t r = 0; r < s.pred.shape.height; ++r) {
        for (std::size_t c = 0; c < s.pred.shape.width; ++c) {
          const Vec2 at = pixel_center(r, c, s.pred.shape);
          const double err = (sample_flow(coarse.pred, at) - sample_flow(coarse.ref, at)).norm();
          if (err > gate) p[s.pred.index(r, c)] = 0.0;
        }
      }
    }
    total += warp_loss(s.pred, s.ref, p) + kConfidenceLossWeight * conf_loss(s.p_hat, p);
  }
  return total;
}

}  // namespace dkm
