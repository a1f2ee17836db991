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

#include "dkm/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "dkm/detail/binary_io.hpp"
#include "dkm/error.hpp"
#include "dkm/parallel.hpp"

namespace dkm {

double Image::gray(std::size_t r, std::size_t c) const {
  if (channels == 1) return at(r, c);
  double s = 0.0;
  for (std::size_t ch = 0; ch < channels; ++ch) s += at(r, c, ch);
  return s / static_cast<double>(channels);
}

namespace {

std::string describe_magic(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  for (std::size_t i = 0; i < std::min<std::size_t>(2, bytes.size()); ++i) {
    const unsigned char ch = bytes[i];
    if (std::isprint(ch)) {
      out += static_cast<char>(ch);
    } else {
      char hex[8];
      std::snprintf(hex, sizeof hex, "\\x%02X", ch);
      out += hex;
    }
  }
  return out.empty() ? "<empty>" : out;
}

// Reads one whitespace-delimited ASCII header token, skipping '#' comments.
std::size_t read_header_number(const std::vector<std::uint8_t>& b, std::size_t& pos,
                               const std::string& path) {
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(b[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  std::size_t value = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    value = value * 10 + (b[pos] - '0');
    if (value > (1u << 30)) throw FormatError("'" + path + "': header value too large", start);
    ++pos;
  }
  if (pos == start) throw FormatError("'" + path + "': malformed PNM header", start);
  return value;
}

}  // namespace

Image load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  const std::vector<std::uint8_t> b((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
  if (b.size() < 2 || b[0] != 'P' || (b[1] != '5' && b[1] != '6'))
    throw FormatError("'" + path + "': unsupported image format (magic '" + describe_magic(b) +
                          "'), expected binary PGM (P5) or PPM (P6)",
                      0);
  const std::size_t channels = b[1] == '5' ? 1 : 3;
  std::size_t pos = 2;
  const std::size_t width = read_header_number(b, pos, path);
  const std::size_t height = read_header_number(b, pos, path);
  const std::size_t maxval = read_header_number(b, pos, path);
  if (width == 0 || height == 0) throw FormatError("'" + path + "': zero image dimension", pos);
  if (maxval == 0 || maxval > 65535) throw FormatError("'" + path + "': invalid maxval", pos);
  if (pos >= b.size() || !std::isspace(b[pos]))
    throw FormatError("'" + path + "': missing whitespace after header", pos);
  ++pos;
  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  const std::size_t expected = width * height * channels * bytes_per_sample;
  if (b.size() - pos < expected)
    throw FormatError("'" + path + "': truncated pixel data, expected " + std::to_string(expected) +
                          " bytes, found " + std::to_string(b.size() - pos),
                      pos);
  Image img(height, width, channels);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    std::size_t v = b[pos + i * bytes_per_sample];
    if (bytes_per_sample == 2) v = (v << 8) | b[pos + i * 2 + 1];
    img.values[i] = std::min(1.0, static_cast<double>(v) * scale);
  }
  return img;
}

void save_image(const Image& img, const std::string& path) {
  if (img.channels != 1 && img.channels != 3)
    throw InvalidArgument("save_image: only 1 or 3 channels supported");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << (img.channels == 1 ? "P5" : "P6") << "\n" << img.width << " " << img.height << "\n255\n";
  std::vector<char> data(img.values.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = static_cast<char>(
        static_cast<unsigned char>(std::lround(std::clamp(img.values[i], 0.0, 1.0) * 255.0)));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

bool FeatureMap::is_zero_cell(std::size_t cell) const {
  return values.row(static_cast<Eigen::Index>(cell)).squaredNorm() == 0.0;
}

FeatureMap extract_dense_descriptors(const Image& img, std::size_t stride,
                                     const DescriptorParams& params) {
  if (stride == 0) throw InvalidArgument("descriptor stride must be >= 1");
  if (img.height < 2 * stride || img.width < 2 * stride)
    throw InvalidArgument("image " + std::to_string(img.height) + "x" + std::to_string(img.width) +
                          " too small for stride " + std::to_string(stride));
  const std::size_t h = img.height, w = img.width;

  std::vector<double> gray(h * w);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) gray[r * w + c] = img.gray(r, c);

  // Per-pixel gradient magnitude split between the two nearest of 8
  // unsigned orientation bins (bin centers at (k + 0.5) * 22.5 degrees).
  std::vector<double> mag(h * w);
  std::vector<double> frac(h * w);
  std::vector<std::uint8_t> bin(h * w);
  const auto px = [&](long r, long c) {
    r = std::clamp(r, 0L, static_cast<long>(h) - 1);
    c = std::clamp(c, 0L, static_cast<long>(w) - 1);
    return gray[static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c)];
  };
  constexpr double kBinWidth = std::numbers::pi / kOrientationBins;
  for (long r = 0; r < static_cast<long>(h); ++r) {
    for (long c = 0; c < static_cast<long>(w); ++c) {
      const double gx = 0.5 * (px(r, c + 1) - px(r, c - 1));
      const double gy = 0.5 * (px(r + 1, c) - px(r - 1, c));
      const std::size_t i = static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c);
      mag[i] = std::sqrt(gx * gx + gy * gy);
      double theta = std::atan2(gy, gx);
      if (theta < 0.0) theta += std::numbers::pi;
      if (theta >= std::numbers::pi) theta -= std::numbers::pi;
      const double p = theta / kBinWidth - 0.5;
      const double fl = std::floor(p);
      frac[i] = p - fl;
      bin[i] = static_cast<std::uint8_t>((static_cast<long>(fl) + static_cast<long>(kOrientationBins)) %
                                         static_cast<long>(kOrientationBins));
    }
  }

  FeatureMap fm;
  fm.height = h / stride;
  fm.width = w / stride;
  fm.channels = kDescriptorChannels;
  fm.stride = stride;
  fm.normalized = true;
  fm.values.setZero(static_cast<Eigen::Index>(fm.height * fm.width),
                    static_cast<Eigen::Index>(kDescriptorChannels));

  const long s = static_cast<long>(stride);
  const auto clamped_index = [&](long r, long c) {
    r = std::clamp(r, 0L, static_cast<long>(h) - 1);
    c = std::clamp(c, 0L, static_cast<long>(w) - 1);
    return static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c);
  };

  parallel_for(fm.height * fm.width, [&](std::size_t cell) {
    const long ci = static_cast<long>(cell / fm.width);
    const long cj = static_cast<long>(cell % fm.width);
    const long y0 = ci * s + s / 2 - 2 * s;
    const long x0 = cj * s + s / 2 - 2 * s;
    double* out = fm.values.row(static_cast<Eigen::Index>(cell)).data();
    const double block_area = static_cast<double>(s * s);

    std::array<double, 16> block_mean{};
    double window_mean = 0.0;
    for (long by = 0; by < 4; ++by) {
      for (long bx = 0; bx < 4; ++bx) {
        double* hist = out + (by * 4 + bx) * kOrientationBins;
        double intensity = 0.0;
        for (long yy = 0; yy < s; ++yy) {
          for (long xx = 0; xx < s; ++xx) {
            const std::size_t i = clamped_index(y0 + by * s + yy, x0 + bx * s + xx);
            intensity += gray[i];
            const double m = mag[i];
            if (m == 0.0) continue;
            hist[bin[i]] += m * (1.0 - frac[i]);
            hist[(bin[i] + 1) % kOrientationBins] += m * frac[i];
          }
        }
        for (std::size_t k = 0; k < kOrientationBins; ++k) hist[k] /= block_area;
        block_mean[static_cast<std::size_t>(by * 4 + bx)] = intensity / block_area;
        window_mean += intensity;
      }
    }
    window_mean /= 16.0 * block_area;

    double* pyr = out + kHistogramChannels;
    double level0 = 0.0;
    std::array<double, 4> level1{};
    for (std::size_t b = 0; b < 16; ++b) {
      const double v = block_mean[b] - window_mean;
      pyr[5 + b] = v;
      level0 += v / 16.0;
      level1[(b / 8) * 2 + (b % 4) / 2] += v / 4.0;
    }
    pyr[0] = level0;
    for (std::size_t q = 0; q < 4; ++q) pyr[1 + q] = level1[q];

    double hist_norm = 0.0, pyr_norm = 0.0;
    for (std::size_t k = 0; k < kHistogramChannels; ++k) hist_norm += out[k] * out[k];
    for (std::size_t k = 0; k < kPyramidChannels; ++k) pyr_norm += pyr[k] * pyr[k];
    hist_norm = std::sqrt(hist_norm);
    pyr_norm = std::sqrt(pyr_norm);
    if (hist_norm > 1e-12)
      for (std::size_t k = 0; k < kHistogramChannels; ++k) out[k] /= hist_norm;
    else
      for (std::size_t k = 0; k < kHistogramChannels; ++k) out[k] = 0.0;
    if (pyr_norm > 1e-12)
      for (std::size_t k = 0; k < kPyramidChannels; ++k) pyr[k] *= params.pyramid_weight / pyr_norm;
    else
      for (std::size_t k = 0; k < kPyramidChannels; ++k) pyr[k] = 0.0;

    double total = 0.0;
    for (std::size_t k = 0; k < kDescriptorChannels; ++k) total += out[k] * out[k];
    total = std::sqrt(total);
    for (std::size_t k = 0; k < kDescriptorChannels; ++k)
      out[k] = total > 0.0 ? static_cast<double>(static_cast<float>(out[k] / total)) : 0.0;
  });
  return fm;
}

void save_feature_file(const FeatureMap& fm, const std::string& path) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (fm.height > kMax || fm.width > kMax || fm.channels > kMax || fm.stride > kMax)
    throw InvalidArgument("feature map too large for DKFM");
  if (static_cast<std::size_t>(fm.values.rows()) != fm.height * fm.width ||
      static_cast<std::size_t>(fm.values.cols()) != fm.channels)
    throw InvalidArgument("feature map values disagree with its header");
  detail::ByteWriter out;
  out.bytes("DKFM", 4);
  out.u32(kFeatureFileVersion);
  out.u32(static_cast<std::uint32_t>(fm.height));
  out.u32(static_cast<std::uint32_t>(fm.width));
  out.u32(static_cast<std::uint32_t>(fm.channels));
  out.u32(static_cast<std::uint32_t>(fm.stride));
  out.u8(fm.normalized ? 1 : 0);
  out.u8(0);
  out.u8(0);
  out.u8(0);
  for (Eigen::Index i = 0; i < fm.values.rows(); ++i)
    for (Eigen::Index k = 0; k < fm.values.cols(); ++k) out.f32(static_cast<float>(fm.values(i, k)));
  out.write_file(path);
}

FeatureMap load_feature_file(const std::string& path) {
  auto in = detail::ByteReader::from_file(path);
  if (in.magic(4) != "DKFM") throw FormatError("'" + path + "': bad magic, expected DKFM", 0);
  const std::size_t version_at = in.offset();
  const std::uint32_t version = in.u32();
  if (version != kFeatureFileVersion)
    throw FormatError("'" + path + "': unsupported DKFM version " + std::to_string(version),
                      version_at);
  FeatureMap fm;
  fm.height = in.u32();
  fm.width = in.u32();
  fm.channels = in.u32();
  const std::size_t stride_at = in.offset();
  fm.stride = in.u32();
  const std::size_t flag_at = in.offset();
  const std::uint8_t flag = in.u8();
  in.skip(3);
  if (fm.stride == 0) throw FormatError("'" + path + "': stride must be >= 1", stride_at);
  if (flag > 1) throw FormatError("'" + path + "': invalid normalization flag", flag_at);
  fm.normalized = flag == 1;
  const unsigned __int128 expected =
      static_cast<unsigned __int128>(fm.height) * fm.width * fm.channels * 4;
  if (expected > std::numeric_limits<std::uint64_t>::max())
    throw FormatError("'" + path + "': header dimensions overflow", 8);
  if (expected != in.remaining())
    throw FormatError("'" + path + "': payload size mismatch, header implies " +
                          std::to_string(static_cast<std::uint64_t>(expected)) +
                          " bytes, file has " + std::to_string(in.remaining()),
                      in.offset());
  fm.values.resize(static_cast<Eigen::Index>(fm.height * fm.width),
                   static_cast<Eigen::Index>(fm.channels));
  for (Eigen::Index i = 0; i < fm.values.rows(); ++i)
    for (Eigen::Index k = 0; k < fm.values.cols(); ++k) fm.values(i, k) = in.f32();
  return fm;
}

bool sample_features(const FeatureMap& fm, const Vec2& at, double* out) {
  const double u_raw = normalized_to_pixel(at.x(), fm.width);
  const double v_raw = normalized_to_pixel(at.y(), fm.height);
  const double umax = static_cast<double>(fm.width - 1);
  const double vmax = static_cast<double>(fm.height - 1);
  const double u = std::clamp(u_raw, 0.0, umax);
  const double v = std::clamp(v_raw, 0.0, vmax);
  const auto c0 = static_cast<std::size_t>(std::floor(u));
  const auto r0 = static_cast<std::size_t>(std::floor(v));
  const std::size_t c1 = std::min(c0 + 1, fm.width - 1);
  const std::size_t r1 = std::min(r0 + 1, fm.height - 1);
  const double fx = u - static_cast<double>(c0);
  const double fy = v - static_cast<double>(r0);
  const double w00 = (1 - fx) * (1 - fy), w01 = fx * (1 - fy), w10 = (1 - fx) * fy, w11 = fx * fy;
  const double* p00 = fm.values.row(static_cast<Eigen::Index>(r0 * fm.width + c0)).data();
  const double* p01 = fm.values.row(static_cast<Eigen::Index>(r0 * fm.width + c1)).data();
  const double* p10 = fm.values.row(static_cast<Eigen::Index>(r1 * fm.width + c0)).data();
  const double* p11 = fm.values.row(static_cast<Eigen::Index>(r1 * fm.width + c1)).data();
  for (std::size_t k = 0; k < fm.channels; ++k)
    out[k] = w00 * p00[k] + w01 * p01[k] + w10 * p10[k] + w11 * p11[k];
  return u != u_raw || v != v_raw;
}

}  // namespace dkm
