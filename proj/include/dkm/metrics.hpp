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

// Evaluation measures: dense-warp accuracy (PCK, AEPE), pose accuracy
// (AUC, mAP, angular errors) and the warp/confidence training losses.

#include <cstdint>
#include <span>
#include <vector>

#include "dkm/geometry.hpp"

namespace dkm {

/// Per-point errors with validity bits; invalid points never enter aggregates.
struct ErrorSample {
  std::vector<double> errors;
  std::vector<std::uint8_t> valid;  // empty means all valid

  std::vector<double> valid_errors() const;
};

struct PrecisionCurve {
  std::vector<double> thresholds;  // strictly increasing
  std::vector<double> precision;
};

/// End-point errors in support-image pixels. mask may be empty (all valid).
ErrorSample endpoint_errors(const WarpField& pred, const WarpField& ref,
                            std::span<const std::uint8_t> mask, GridShape support_pixels);

/// Mask of reference pixels with confidence > 0.5.
std::vector<std::uint8_t> reference_mask(const WarpField& ref);

/// Fraction of valid errors strictly below tau. Throws UndefinedResult when
/// nothing is valid.
double precision_below(const ErrorSample& e, double tau);

double pck(const WarpField& pred, const WarpField& ref, std::span<const std::uint8_t> mask,
           double tau_px, GridShape support_pixels);

double aepe(const WarpField& pred, const WarpField& ref, std::span<const std::uint8_t> mask,
            GridShape support_pixels);

PrecisionCurve precision_curve(const ErrorSample& e, std::span<const double> thresholds);

/// Area under the cumulative error curve up to alpha, divided by alpha. The
/// curve passes through (0, #(e<=0)/n) and (u, #(e<=u)/n) for each unique
/// error u <= alpha, is held flat to alpha, and is integrated with the
/// composite trapezoidal rule.
double auc(const ErrorSample& e, double alpha);

/// Mean precision over the thresholds {5, 10, 20} that do not exceed alpha;
/// alpha must be one of them.
double map_at(const ErrorSample& e, double alpha_deg);

double rotation_error(const Mat3& r, const Mat3& r_hat);
/// arccos(|cos angle|): translation direction is sign-ambiguous.
double translation_error(const Vec3& t, const Vec3& t_hat);
double pose_error(const Mat3& r, const Vec3& t, const Mat3& r_hat, const Vec3& t_hat);

/// Mean over pixels of p * |pred - ref|_2 in normalized units.
double warp_loss(const WarpField& pred, const WarpField& ref, std::span<const double> p);

/// Mean binary cross-entropy with predictions clamped to [1e-7, 1 - 1e-7].
double conf_loss(std::span<const double> p_hat, std::span<const double> p);

inline constexpr double kConfidenceLossWeight = 0.01;

struct ScaleTerm {
  WarpField pred;
  WarpField ref;
  std::vector<double> p_hat;
  std::vector<double> p;
};

/// Sum over scales (ordered coarse to fine) of warp_loss + 0.01 conf_loss.
/// At every finer scale p is zeroed where the next coarser predicted warp,
/// looked up bilinearly, is more than coarse_gate coarse cells from its
/// reference.
double total_loss(const std::vector<ScaleTerm>& scales, double coarse_gate_cells = 4.0);

}  // namespace dkm
