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

#include "dkm/embedding.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "dkm/detail/binary_io.hpp"
#include "dkm/error.hpp"

namespace dkm {

namespace {

constexpr double kPi = std::numbers::pi;

// Integral over u in [0, 1/2] of cos^4(pi u) u: radial energy of a unit cos^2 bump.
double cossq_energy_integral() {
  return 3.0 / 64.0 - 1.0 / (4.0 * kPi * kPi);
}

double radial_cossq_value(double dist, double support) {
  if (dist >= 0.5 * support) return 0.0;
  const double c = std::cos(kPi * dist / support);
  return c * c;
}

void check_finite(const Vec2& x) {
  if (!std::isfinite(x.x()) || !std::isfinite(x.y()))
    throw InvalidArgument("embed: non-finite coordinate");
}

}  // namespace

const char* to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Fourier: return "fourier";
    case BasisKind::SE: return "se";
    case BasisKind::CosSq: return "cossq";
    case BasisKind::Identity: return "identity";
  }
  return "unknown";
}

BasisKind parse_basis_kind(const std::string& name) {
  if (name == "fourier") return BasisKind::Fourier;
  if (name == "se") return BasisKind::SE;
  if (name == "cossq") return BasisKind::CosSq;
  if (name == "identity") return BasisKind::Identity;
  throw InvalidArgument("unknown embedding basis '" + name + "'");
}

double cossq_support_length(double ell) {
  // Matching k(r) ~ 1 - r^2 |grad f|^2 / (4 |f|^2) against 1 - ell^2 r^2 / 2
  // gives s = pi sqrt(I2 / (2 I1)) / ell with I2 = 1/16.
  const double i1 = cossq_energy_integral();
  const double i2 = 1.0 / 16.0;
  return kPi * std::sqrt(i2 / (2.0 * i1)) / ell;
}

void EmbeddingBasis::embed_into(const Vec2& x, double* out) const {
  switch (kind_) {
    case BasisKind::Fourier:
      for (std::size_t i = 0; i < dim_; ++i)
        out[i] = std::cos(params_(i, 0) * x.x() + params_(i, 1) * x.y() + phase_(i));
      break;
    case BasisKind::SE: {
      const double inv_w2 = 1.0 / (width_ * width_);
      for (std::size_t i = 0; i < dim_; ++i) {
        const double dx = x.x() - params_(i, 0);
        const double dy = x.y() - params_(i, 1);
        out[i] = std::exp(-(dx * dx + dy * dy) * inv_w2);
      }
      break;
    }
    case BasisKind::CosSq:
      for (std::size_t i = 0; i < dim_; ++i) {
        const double dx = x.x() - params_(i, 0);
        const double dy = x.y() - params_(i, 1);
        out[i] = radial_cossq_value(std::sqrt(dx * dx + dy * dy), width_);
      }
      break;
    case BasisKind::Identity:
      out[0] = x.x();
      out[1] = x.y();
      break;
  }
}

bool EmbeddingBasis::operator==(const EmbeddingBasis& o) const {
  return kind_ == o.kind_ && dim_ == o.dim_ && ell_ == o.ell_ && seed_ == o.seed_ &&
         params_ == o.params_ && phase_.size() == o.phase_.size() &&
         (phase_.size() == 0 || phase_ == o.phase_) && kernel_scale_ == o.kernel_scale_;
}

void EmbeddingBasis::finalize() {
  const double d = static_cast<double>(dim_);
  switch (kind_) {
    case BasisKind::Fourier:
      width_ = 1.0 / ell_;
      extent_ = 0.0;
      kernel_scale_ = 2.0 / d;
      break;
    case BasisKind::SE: {
      width_ = 1.0 / ell_;
      extent_ = 1.0 + 1.0 / ell_;
      const double area = 4.0 * extent_ * extent_;
      // (1/A) * integral of the product of two bumps = (pi w^2 / 2A) exp(-r^2 / 2w^2)
      kernel_scale_ = 2.0 * area / (kPi * width_ * width_ * d);
      break;
    }
    case BasisKind::CosSq: {
      width_ = cossq_support_length(ell_);
      extent_ = 1.0 + 0.5 * width_;
      // Calibrate so that empirical_kernel(x, x) averages to 1 over [-1,1]^2.
      constexpr int kProbe = 32;
      std::vector<double> row(dim_);
      double total = 0.0;
      for (int r = 0; r < kProbe; ++r) {
        for (int c = 0; c < kProbe; ++c) {
          const Vec2 p(pixel_to_normalized(c, kProbe), pixel_to_normalized(r, kProbe));
          embed_into(p, row.data());
          for (double v : row) total += v * v;
        }
      }
      const double mean_sq = total / (kProbe * kProbe);
      if (mean_sq > 0.0) {
        kernel_scale_ = 1.0 / mean_sq;
      } else {
        const double area = 4.0 * extent_ * extent_;
        const double bump_energy = 2.0 * kPi * width_ * width_ * cossq_energy_integral();
        kernel_scale_ = area / (bump_energy * d);
      }
      break;
    }
    case BasisKind::Identity:
      width_ = 0.0;
      extent_ = 0.0;
      kernel_scale_ = 1.0;
      break;
  }
}

EmbeddingBasis sample_basis(BasisKind kind, std::size_t dimension, double ell, std::uint64_t seed) {
  if (dimension == 0) throw InvalidArgument("sample_basis: D must be >= 1");
  if (!(ell > 0.0) || !std::isfinite(ell)) throw InvalidArgument("sample_basis: ell must be > 0");
  if (kind == BasisKind::Identity) return identity_basis();

  EmbeddingBasis b;
  b.kind_ = kind;
  b.dim_ = dimension;
  b.ell_ = ell;
  b.seed_ = seed;
  b.params_.resize(static_cast<Eigen::Index>(dimension), 2);
  std::mt19937_64 rng(seed);
  const auto n = static_cast<Eigen::Index>(dimension);
  if (kind == BasisKind::Fourier) {
    std::normal_distribution<double> normal(0.0, ell);
    for (Eigen::Index i = 0; i < n; ++i) {
      b.params_(i, 0) = normal(rng);
      b.params_(i, 1) = normal(rng);
    }
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * kPi);
    b.phase_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) b.phase_(i) = uniform(rng);
  } else {
    const double extent =
        kind == BasisKind::SE ? 1.0 + 1.0 / ell : 1.0 + 0.5 * cossq_support_length(ell);
    std::uniform_real_distribution<double> uniform(-extent, extent);
    for (Eigen::Index i = 0; i < n; ++i) {
      b.params_(i, 0) = uniform(rng);
      b.params_(i, 1) = uniform(rng);
    }
  }
  b.finalize();
  return b;
}

EmbeddingBasis identity_basis() {
  EmbeddingBasis b;
  b.kind_ = BasisKind::Identity;
  b.dim_ = 2;
  b.ell_ = 1.0;
  b.seed_ = 0;
  b.params_.resize(0, 2);
  b.finalize();
  return b;
}

EmbeddedCoords embed(const EmbeddingBasis& basis, std::span<const Vec2> coords) {
  EmbeddedCoords out;
  out.kind = basis.kind();
  out.seed = basis.seed();
  const auto d = static_cast<Eigen::Index>(basis.dimension());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(
      static_cast<Eigen::Index>(coords.size()), d);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    check_finite(coords[i]);
    basis.embed_into(coords[i], rows.row(static_cast<Eigen::Index>(i)).data());
  }
  out.values = rows;
  return out;
}

double empirical_kernel(const EmbeddingBasis& basis, const Vec2& x, const Vec2& y) {
  check_finite(x);
  check_finite(y);
  std::vector<double> bx(basis.dimension()), by(basis.dimension());
  basis.embed_into(x, bx.data());
  basis.embed_into(y, by.data());
  double dot = 0.0;
  for (std::size_t i = 0; i < bx.size(); ++i) dot += bx[i] * by[i];
  return basis.kernel_scale() * dot;
}

double gaussian_limit(double ell, const Vec2& x, const Vec2& y) {
  return std::exp(-0.5 * ell * ell * (x - y).squaredNorm());
}

double limit_deviation(const EmbeddingBasis& basis, std::size_t pairs, std::uint64_t seed) {
  if (pairs == 0) throw InvalidArgument("limit_deviation needs at least one pair");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const double x0 = u(rng), x1 = u(rng), y0 = u(rng), y1 = u(rng);
    const Vec2 x(x0, x1), y(y0, y1);
    total += std::abs(empirical_kernel(basis, x, y) - gaussian_limit(basis.ell(), x, y));
  }
  return total / static_cast<double>(pairs);
}

MetamerSeparation metamer_separation(const EmbeddingBasis& basis, const Vec2& x, const Vec2& y) {
  if (x == y) throw InvalidArgument("metamer_separation: x and y must differ");
  check_finite(x);
  check_finite(y);
  const auto d = static_cast<Eigen::Index>(basis.dimension());
  Vector bx(d), by(d), bmid(d);
  basis.embed_into(x, bx.data());
  basis.embed_into(y, by.data());
  basis.embed_into(0.5 * (x + y), bmid.data());
  const Vector mean = 0.5 * (bx + by);
  auto cosine = [](const Vector& a, const Vector& b) {
    const double denom = a.norm() * b.norm();
    return denom > 0.0 ? a.dot(b) / denom : 0.0;
  };
  return {cosine(mean, bmid), cosine(mean, bx), cosine(mean, by)};
}

void save_basis_file(const EmbeddingBasis& basis, const std::string& path) {
  detail::ByteWriter out;
  out.bytes("DKEB", 4);
  out.u32(kBasisFileVersion);
  out.u8(static_cast<std::uint8_t>(basis.kind()));
  out.u32(static_cast<std::uint32_t>(basis.dimension()));
  out.f64(basis.ell());
  out.u64(basis.seed());
  const Matrix& p = basis.parameters();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    out.f64(p(i, 0));
    out.f64(p(i, 1));
  }
  for (Eigen::Index i = 0; i < basis.phase().size(); ++i) out.f64(basis.phase()(i));
  out.write_file(path);
}

EmbeddingBasis load_basis_file(const std::string& path) {
  auto in = detail::ByteReader::from_file(path);
  if (in.magic(4) != "DKEB") throw FormatError("'" + path + "': bad magic, expected DKEB", 0);
  const std::size_t version_at = in.offset();
  if (in.u32() != kBasisFileVersion)
    throw FormatError("'" + path + "': unsupported DKEB version", version_at);
  const std::size_t kind_at = in.offset();
  const std::uint8_t kind = in.u8();
  if (kind > static_cast<std::uint8_t>(BasisKind::Identity))
    throw FormatError("'" + path + "': unknown basis kind " + std::to_string(kind), kind_at);
  EmbeddingBasis b;
  b.kind_ = static_cast<BasisKind>(kind);
  b.dim_ = in.u32();
  b.ell_ = in.f64();
  b.seed_ = in.u64();
  const std::size_t rows = b.kind_ == BasisKind::Identity ? 0 : b.dim_;
  const std::size_t phases = b.kind_ == BasisKind::Fourier ? b.dim_ : 0;
  const std::size_t expected = (rows * 2 + phases) * 8;
  if (in.remaining() != expected)
    throw FormatError("'" + path + "': payload size mismatch, header implies " +
                          std::to_string(expected) + " bytes, file has " +
                          std::to_string(in.remaining()),
                      in.offset());
  b.params_.resize(static_cast<Eigen::Index>(rows), 2);
  for (std::size_t i = 0; i < rows; ++i) {
    b.params_(static_cast<Eigen::Index>(i), 0) = in.f64();
    b.params_(static_cast<Eigen::Index>(i), 1) = in.f64();
  }
  b.phase_.resize(static_cast<Eigen::Index>(phases));
  for (std::size_t i = 0; i < phases; ++i) b.phase_(static_cast<Eigen::Index>(i)) = in.f64();
  b.finalize();
  return b;
}

}  // namespace dkm
