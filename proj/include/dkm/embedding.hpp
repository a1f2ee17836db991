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

// Coordinate embeddings R^2 -> R^D. Every basis is parametrized by the same
// inverse length scale ell: the normalized inner product of two embeddings
// tends to exp(-ell^2 |x - x'|^2 / 2) as D grows.

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>

#include "dkm/geometry.hpp"

namespace dkm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class BasisKind : std::uint8_t {
  Fourier = 0,   // cos(W x + b), W_ij ~ N(0, ell^2), b_i ~ U[0, 2pi)
  SE = 1,        // exp(-|x - c|^2 / w^2), w = 1/ell
  CosSq = 2,     // cos^2(pi |x - c| / s) on |x - c| < s/2
  Identity = 3,  // raw coordinates, D = 2 (no spatial embedding)
};

const char* to_string(BasisKind kind);
BasisKind parse_basis_kind(const std::string& name);

/// Support length s of the cos^2 basis whose implied kernel has the same
/// curvature at zero separation as exp(-ell^2 r^2 / 2).
double cossq_support_length(double ell);

class EmbeddingBasis {
 public:
  BasisKind kind() const { return kind_; }
  std::size_t dimension() const { return dim_; }
  double ell() const { return ell_; }
  std::uint64_t seed() const { return seed_; }

  /// Fourier: D x 2 projection. SE / cos^2: D x 2 centers.
  const Matrix& parameters() const { return params_; }
  /// Fourier phases; empty for other kinds.
  const Vector& phase() const { return phase_; }
  /// Width of a single SE bump (1/ell) or support length of a cos^2 bump.
  double width() const { return width_; }
  /// Half-extent of the square from which SE / cos^2 centers were drawn.
  double sampling_extent() const { return extent_; }
  /// Scale applied to <B(x), B(y)> by empirical_kernel.
  double kernel_scale() const { return kernel_scale_; }

  /// Embeds one coordinate into out (length D).
  void embed_into(const Vec2& x, double* out) const;

  bool operator==(const EmbeddingBasis& other) const;

 private:
  friend EmbeddingBasis sample_basis(BasisKind, std::size_t, double, std::uint64_t);
  friend EmbeddingBasis identity_basis();
  friend EmbeddingBasis load_basis_file(const std::string&);
  void finalize();

  BasisKind kind_ = BasisKind::Fourier;
  std::size_t dim_ = 0;
  double ell_ = 1.0;
  std::uint64_t seed_ = 0;
  Matrix params_;
  Vector phase_;
  double width_ = 0.0;
  double extent_ = 0.0;
  double kernel_scale_ = 1.0;
};

/// Deterministic per (kind, D, ell, seed). Throws InvalidArgument when D = 0
/// or ell <= 0.
EmbeddingBasis sample_basis(BasisKind kind, std::size_t dimension, double ell, std::uint64_t seed);

/// The 2-dimensional identity "embedding" used when spatial embedding is off.
EmbeddingBasis identity_basis();

struct EmbeddedCoords {
  Matrix values;  // one row per point, D columns
  BasisKind kind = BasisKind::Fourier;
  std::uint64_t seed = 0;
  std::size_t dimension() const { return static_cast<std::size_t>(values.cols()); }
};

/// Throws InvalidArgument for non-finite coordinates.
EmbeddedCoords embed(const EmbeddingBasis& basis, std::span<const Vec2> coords);

double empirical_kernel(const EmbeddingBasis& basis, const Vec2& x, const Vec2& y);

/// The Gaussian every basis approximates: exp(-ell^2 |x - y|^2 / 2).
double gaussian_limit(double ell, const Vec2& x, const Vec2& y);

/// Mean |empirical_kernel - gaussian_limit| over `pairs` point pairs drawn
/// uniformly from [-1,1]^2 with the given seed.
double limit_deviation(const EmbeddingBasis& basis, std::size_t pairs, std::uint64_t seed);

struct MetamerSeparation {
  double rho_mid;  // cos(mean embedding, embedding of the midpoint)
  double rho_x;    // cos(mean embedding, B(x))
  double rho_y;    // cos(mean embedding, B(y))
};

/// Throws InvalidArgument when x == y.
MetamerSeparation metamer_separation(const EmbeddingBasis& basis, const Vec2& x, const Vec2& y);

// DKEB files: "DKEB", u32 version, u8 kind, u32 D, f64 ell, u64 seed, then
// the raw parameters (projection / centers row-major, then phases) as f64.
inline constexpr std::uint32_t kBasisFileVersion = 1;
void save_basis_file(const EmbeddingBasis& basis, const std::string& path);
EmbeddingBasis load_basis_file(const std::string& path);

}  // namespace dkm
