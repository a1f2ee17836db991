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

#include "dkm/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "dkm/error.hpp"
#include "dkm/metrics.hpp"
#include "dkm/parallel.hpp"
#include "dkm/pipeline.hpp"
#include "dkm/regress.hpp"

namespace dkm {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void check_range(double lo, double hi, const char* name) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidArgument(std::string("ill-ordered range for ") + name);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// Toy

void ToyConfig::validate() const {
  if (n == 0) throw InvalidArgument("toy sample count must be at least 1");
  if (!(kernel_length > 0.0)) throw InvalidArgument("toy kernel length must be positive");
  if (weight_first < 0.0 || weight_second < 0.0 ||
      std::abs(weight_first + weight_second - 1.0) > 1e-12)
    throw InvalidArgument("toy mixture weights must be non-negative and sum to 1");
  if (!(noise_variance >= 0.0)) throw InvalidArgument("toy noise variance must be non-negative");
  if (!(jitter >= 0.0)) throw InvalidArgument("toy jitter must be non-negative");
}

std::vector<ToySample> toy_sample(const ToyConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(cfg.noise_variance));
  std::vector<ToySample> out;
  out.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const bool first = std::generate_canonical<double, 53>(rng) < cfg.weight_first;
    ToySample s{};
    if (first) {
      s.x = uniform(rng, 0.0, 0.5);
      s.y = s.x + noise(rng);
      s.branch = 1;
    } else {
      s.x = uniform(rng, 0.4, 1.0);
      s.y = -s.x + noise(rng);
      s.branch = 2;
    }
    out.push_back(s);
  }
  return out;
}

ToyCurves toy_run(std::span<const ToySample> samples, const ToyConfig& cfg) {
  if (samples.empty()) throw InvalidArgument("toy_run needs at least one sample");
  cfg.validate();
  const std::size_t n = samples.size();
  SupportSet support;
  support.features.resize(static_cast<Eigen::Index>(n), 1);
  support.targets.resize(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) {
    support.features(static_cast<Eigen::Index>(i), 0) = samples[i].x;
    support.targets(static_cast<Eigen::Index>(i), 0) = samples[i].y;
  }
  ToyCurves c;
  c.x.resize(kToyQueryPoints);
  FeatureMatrix query(static_cast<Eigen::Index>(kToyQueryPoints), 1);
  for (std::size_t i = 0; i < kToyQueryPoints; ++i) {
    c.x[i] = static_cast<double>(i) / static_cast<double>(kToyQueryPoints - 1);
    query(static_cast<Eigen::Index>(i), 0) = c.x[i];
  }
  const KernelSpec spec = KernelSpec::squared_exponential(cfg.kernel_length);
  const GPPosterior gp = gp_posterior(support, query, spec, cfg.jitter);
  const RegressorOutput attn = kernel_smoother(support, query, spec);
  const RegressorOutput nn = nearest_neighbour(support, query, NeighbourMetric::Euclidean);

  c.gp_mean.resize(kToyQueryPoints);
  c.gp_var.resize(kToyQueryPoints);
  c.attention.resize(kToyQueryPoints);
  c.nearest.resize(kToyQueryPoints);
  for (std::size_t i = 0; i < kToyQueryPoints; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    c.gp_mean[i] = gp.mean(r, 0);
    c.gp_var[i] = gp.variance(r);
    c.attention[i] = attn.embedding(r, 0);
    c.nearest[i] = nn.embedding(r, 0);
  }
  c.support_count.assign(kToyQueryPoints, 0);
  for (const auto& s : samples) {
    const double t = std::clamp(s.x, 0.0, 1.0) * static_cast<double>(kToyQueryPoints - 1);
    ++c.support_count[static_cast<std::size_t>(std::lround(t))];
  }
  return c;
}

std::string toy_csv(const ToyCurves& c) {
  std::string out = "x,gp_mean,gp_var,attn,nn,support\n";
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    out += fmt(c.x[i]) + ',' + fmt(c.gp_mean[i]) + ',' + fmt(c.gp_var[i]) + ',' +
           fmt(c.attention[i]) + ',' + fmt(c.nearest[i]) + ',' +
           std::to_string(c.support_count[i]) + '\n';
  }
  return out;
}

void write_toy_csv(const ToyCurves& curves, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << toy_csv(curves);
  if (!f) throw IoError("write failed for " + path);
}

double transition_width(const std::vector<double>& x, const std::vector<double>& pred,
                        double level) {
  const double inf = std::numeric_limits<double>::infinity();
  if (x.size() != pred.size()) throw InvalidArgument("curve length mismatch");
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("transition level must be in (0, 1)");
  auto u = [&](std::size_t i) { return x[i] > 0.0 ? pred[i] / x[i] : 1.0; };
  std::size_t c = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= 0.35 && x[i] <= 0.8 && u(i) < 0.0) {
      c = i;
      break;
    }
  }
  if (c == x.size()) return inf;
  std::size_t right = x.size();
  for (std::size_t i = c; i < x.size(); ++i) {
    if (u(i) <= -level) {
      right = i;
      break;
    }
  }
  std::size_t left = x.size();
  for (std::size_t i = c + 1; i-- > 0;) {
    if (u(i) >= level) {
      left = i;
      break;
    }
  }
  if (right == x.size() || left == x.size()) return inf;
  return x[right] - x[left];
}

double branch_rmse(const std::vector<double>& x, const std::vector<double>& pred, double lo,
                   double hi) {
  if (x.size() != pred.size()) throw InvalidArgument("curve length mismatch");
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    const double d = pred[i] - x[i];
    s += d * d;
    ++n;
  }
  if (n == 0) throw UndefinedResult("no query points in the requested interval");
  return std::sqrt(s / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Textures and synthetic pairs

Image procedural_texture(std::size_t height, std::size_t width, std::uint64_t seed) {
  if (height == 0 || width == 0) throw InvalidArgument("texture size must be positive");
  Image img(height, width, 1);
  std::mt19937_64 rng(seed);
  constexpr std::array<double, 5> periods{48.0, 24.0, 12.0, 6.0, 3.0};
  constexpr std::array<double, 5> amps{1.0, 0.8, 0.6, 0.4, 0.25};
  for (std::size_t o = 0; o < periods.size(); ++o) {
    const double p = periods[o];
    const auto gh = static_cast<std::size_t>(std::ceil(static_cast<double>(height) / p)) + 2;
    const auto gw = static_cast<std::size_t>(std::ceil(static_cast<double>(width) / p)) + 2;
    std::vector<double> lattice(gh * gw);
    for (auto& v : lattice) v = std::generate_canonical<double, 53>(rng);
    const double oy = uniform(rng, 0.0, p), ox = uniform(rng, 0.0, p);
    for (std::size_t r = 0; r < height; ++r) {
      const double fy = (static_cast<double>(r) + oy) / p;
      const auto y0 = static_cast<std::size_t>(fy);
      double ty = fy - static_cast<double>(y0);
      ty = ty * ty * (3.0 - 2.0 * ty);
      for (std::size_t c = 0; c < width; ++c) {
        const double fx = (static_cast<double>(c) + ox) / p;
        const auto x0 = static_cast<std::size_t>(fx);
        double tx = fx - static_cast<double>(x0);
        tx = tx * tx * (3.0 - 2.0 * tx);
        const double a = lattice[y0 * gw + x0], b = lattice[y0 * gw + x0 + 1];
        const double d = lattice[(y0 + 1) * gw + x0], e = lattice[(y0 + 1) * gw + x0 + 1];
        const double top = a + (b - a) * tx, bot = d + (e - d) * tx;
        img.at(r, c) += amps[o] * (top + (bot - top) * ty);
      }
    }
  }
  const auto [lo, hi] = std::minmax_element(img.values.begin(), img.values.end());
  const double l = *lo, range = *hi - *lo;
  for (auto& v : img.values) v = range > 0.0 ? (v - l) / range : 0.5;
  return img;
}

void SynthPairConfig::validate() const {
  if (!(max_rotation_deg >= 0.0)) throw InvalidArgument("rotation range must be non-negative");
  check_range(min_scale, max_scale, "scale");
  if (!(min_scale > 0.0)) throw InvalidArgument("scale range must be positive");
  if (!(max_translation >= 0.0)) throw InvalidArgument("translation range must be non-negative");
  if (!(max_perspective >= 0.0)) throw InvalidArgument("perspective range must be non-negative");
  check_range(min_brightness, max_brightness, "brightness");
  check_range(min_contrast, max_contrast, "contrast");
  check_range(min_gamma, max_gamma, "gamma");
  if (!(min_gamma > 0.0)) throw InvalidArgument("gamma range must be positive");
  if (!(noise_std >= 0.0)) throw InvalidArgument("noise std must be non-negative");
}

namespace {

// Homography is usable when its projective denominator stays positive over
// the image square, so the whole query image maps without a horizon.
bool well_conditioned(const Mat3& m) {
  if (std::abs(m.determinant()) <= 1e-12) return false;
  for (double x : {-1.0, 1.0})
    for (double y : {-1.0, 1.0})
      if (m(2, 0) * x + m(2, 1) * y + m(2, 2) <= 1e-3) return false;
  return true;
}

}  // namespace

Homography sample_homography(const SynthPairConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 16; ++attempt) {
    const double theta = uniform(rng, -cfg.max_rotation_deg, cfg.max_rotation_deg) *
                         std::numbers::pi / 180.0;
    const double s = uniform(rng, cfg.min_scale, cfg.max_scale);
    const double tx = uniform(rng, -cfg.max_translation, cfg.max_translation);
    const double ty = uniform(rng, -cfg.max_translation, cfg.max_translation);
    const double px = uniform(rng, -cfg.max_perspective, cfg.max_perspective);
    const double py = uniform(rng, -cfg.max_perspective, cfg.max_perspective);
    Mat3 m;
    m << s * std::cos(theta), -s * std::sin(theta), tx,
         s * std::sin(theta), s * std::cos(theta), ty,
         px, py, 1.0;
    if (well_conditioned(m)) return Homography(m);
  }
  throw EstimationFailure("could not sample an invertible homography in 16 attempts");
}

SynthPair synth_pair(const Image& img, const SynthPairConfig& cfg, std::uint64_t seed) {
  if (img.height < 2 || img.width < 2) throw InvalidArgument("image too small for synth_pair");
  cfg.validate();
  const Homography h = sample_homography(cfg, substream_seed(seed, "homography"));
  const Homography inv = h.inverse();

  std::mt19937_64 rng(substream_seed(seed, "noise"));
  const double gain = uniform(rng, cfg.min_contrast, cfg.max_contrast);
  const double bias = uniform(rng, cfg.min_brightness, cfg.max_brightness);
  const double gamma = uniform(rng, cfg.min_gamma, cfg.max_gamma);
  std::normal_distribution<double> noise(0.0, cfg.noise_std);

  const GridShape shape{img.height, img.width};
  const std::size_t ch = img.channels;
  Image out(img.height, img.width, ch);
  std::vector<double> px(ch);
  for (std::size_t r = 0; r < img.height; ++r) {
    for (std::size_t c = 0; c < img.width; ++c) {
      Vec2 q;
      const bool ok = inv.apply(pixel_center(r, c, shape), q);
      std::fill(px.begin(), px.end(), 0.0);
      if (ok) {
        const double fx = normalized_to_pixel(q.x(), img.width);
        const double fy = normalized_to_pixel(q.y(), img.height);
        if (fx >= -0.5 && fy >= -0.5 && fx <= static_cast<double>(img.width) - 0.5 &&
            fy <= static_cast<double>(img.height) - 0.5) {
          const double cx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
          const double cy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
          const auto x0 = std::min(static_cast<std::size_t>(cx), img.width - 2);
          const auto y0 = std::min(static_cast<std::size_t>(cy), img.height - 2);
          const double ax = cx - static_cast<double>(x0), ay = cy - static_cast<double>(y0);
          for (std::size_t k = 0; k < ch; ++k) {
            px[k] = (1 - ay) * ((1 - ax) * img.at(y0, x0, k) + ax * img.at(y0, x0 + 1, k)) +
                    ay * ((1 - ax) * img.at(y0 + 1, x0, k) + ax * img.at(y0 + 1, x0 + 1, k));
          }
        }
      }
      for (std::size_t k = 0; k < ch; ++k) {
        double v = std::clamp(gain * std::pow(std::max(px[k], 0.0), gamma) + bias, 0.0, 1.0);
        if (cfg.noise_std > 0.0) v += noise(rng);
        out.at(r, c, k) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return {std::move(out), h, homography_to_warp(h, make_grid(img.height, img.width))};
}

// ---------------------------------------------------------------------------
// Homography estimation

namespace {

Mat3 hartley(std::span<const Vec2> p) {
  Vec2 c = Vec2::Zero();
  for (const auto& v : p) c += v;
  c /= static_cast<double>(p.size());
  double d = 0.0;
  for (const auto& v : p) d += (v - c).norm();
  d /= static_cast<double>(p.size());
  const double s = d > 0.0 ? std::numbers::sqrt2 / d : 1.0;
  Mat3 t;
  t << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
  return t;
}

double transfer_error(const Homography& h, const Homography& inv, const Match& m) {
  Vec2 fwd, bwd;
  if (!h.apply(m.query, fwd) || !inv.apply(m.support, bwd))
    return std::numeric_limits<double>::infinity();
  return (m.support - fwd).squaredNorm() + (m.query - bwd).squaredNorm();
}

std::size_t count_inliers(const Homography& h, std::span<const Match> matches, double thresh2,
                          std::vector<std::uint8_t>* mask) {
  const Homography inv = h.inverse();
  std::size_t n = 0;
  if (mask) mask->assign(matches.size(), 0);
  for (std::size_t i = 0; i < matches.size(); ++i) {
    if (transfer_error(h, inv, matches[i]) < thresh2) {
      ++n;
      if (mask) (*mask)[i] = 1;
    }
  }
  return n;
}

bool try_dlt(std::span<const Vec2> src, std::span<const Vec2> dst, Homography& out) {
  try {
    out = dlt_homography(src, dst);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

}  // namespace

Homography dlt_homography(std::span<const Vec2> src, std::span<const Vec2> dst) {
  if (src.size() != dst.size()) throw InvalidArgument("DLT needs equally many points");
  if (src.size() < 4) throw InvalidArgument("DLT needs at least 4 correspondences");
  const Mat3 ts = hartley(src), td = hartley(dst);
  const auto n = static_cast<Eigen::Index>(src.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 p = ts * src[static_cast<std::size_t>(i)].homogeneous();
    const Vec3 q = td * dst[static_cast<std::size_t>(i)].homogeneous();
    const double x = p.x(), y = p.y(), u = q.x(), v = q.y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Mat3 m = td.inverse() * hn * ts;
  if (!m.allFinite()) throw InvalidArgument("degenerate DLT configuration");
  return Homography(m);
}

RansacResult ransac_homography(std::span<const Match> matches, std::size_t iterations,
                               double inlier_thresh, std::uint64_t seed) {
  if (matches.size() < 4)
    throw EstimationFailure("RANSAC needs at least 4 matches, got " +
                            std::to_string(matches.size()));
  if (!(inlier_thresh > 0.0)) throw InvalidArgument("inlier threshold must be positive");
  const double thresh2 = inlier_thresh * inlier_thresh;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, matches.size() - 1);

  std::size_t best = 0;
  Homography best_h;
  std::array<Vec2, 4> src, dst;
  for (std::size_t it = 0; it < iterations; ++it) {
    std::array<std::size_t, 4> idx{};
    for (std::size_t k = 0; k < 4; ++k) {
      std::size_t j;
      do {
        j = pick(rng);
      } while (std::find(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), j) !=
               idx.begin() + static_cast<std::ptrdiff_t>(k));
      idx[k] = j;
      src[k] = matches[j].query;
      dst[k] = matches[j].support;
    }
    Homography h;
    if (!try_dlt(src, dst, h)) continue;
    const std::size_t n = count_inliers(h, matches, thresh2, nullptr);
    if (n > best) {
      best = n;
      best_h = h;
    }
  }
  if (best < 4) throw EstimationFailure("no RANSAC hypothesis reached 4 inliers");

  RansacResult res;
  res.h = best_h;
  res.inlier_count = count_inliers(best_h, matches, thresh2, &res.inliers);
  // Refit on the consensus set until it stops growing.
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<Vec2> s, d;
    for (std::size_t i = 0; i < matches.size(); ++i) {
      if (!res.inliers[i]) continue;
      s.push_back(matches[i].query);
      d.push_back(matches[i].support);
    }
    Homography refit;
    if (!try_dlt(s, d, refit)) break;
    std::vector<std::uint8_t> mask;
    const std::size_t n = count_inliers(refit, matches, thresh2, &mask);
    if (n < res.inlier_count) break;
    const bool same = mask == res.inliers;
    res.h = refit;
    res.inliers = std::move(mask);
    res.inlier_count = n;
    if (same) break;
  }
  return res;
}

double corner_error_px(const Homography& estimate, const Homography& truth, GridShape pixels) {
  double total = 0.0;
  for (double x : {-1.0, 1.0}) {
    for (double y : {-1.0, 1.0}) {
      Vec2 a, b;
      if (!estimate.apply(Vec2(x, y), a) || !truth.apply(Vec2(x, y), b))
        return std::numeric_limits<double>::infinity();
      const double dx = (a.x() - b.x()) * 0.5 * static_cast<double>(pixels.width);
      const double dy = (a.y() - b.y()) * 0.5 * static_cast<double>(pixels.height);
      total += std::hypot(dx, dy);
    }
  }
  return total / 4.0;
}

// ---------------------------------------------------------------------------
// Benchmark

namespace {

std::size_t finest_stride(const PipelineConfig& p) {
  std::size_t s = std::numeric_limits<std::size_t>::max();
  for (auto v : p.strides) s = std::min(s, v);
  for (auto v : p.refine_strides) s = std::min(s, v);
  return s;
}

PairReport run_pair(const Image& src, std::size_t index, const BenchmarkConfig& cfg,
                    const PipelineConfig& pipeline) {
  PairReport rep;
  rep.index = index;
  rep.seed = substream_seed(cfg.seed, "pair:" + std::to_string(index));
  try {
    const SynthPair pair = synth_pair(src, cfg.synth, rep.seed);
    const GridShape pixels{src.height, src.width};

    WarpField pred;
    if (cfg.pipeline == BenchPipeline::Matcher) {
      pred = match_images(src, pair.warped, pipeline).warp;
    } else {
      const std::size_t s = finest_stride(pipeline);
      const GridShape grid{src.height / s, src.width / s};
      pred = cfg.pipeline == BenchPipeline::Oracle
                 ? homography_to_warp(pair.h, make_grid(grid.height, grid.width))
                 : identity_warp(grid);
    }
    pred = clip_to_grid(pred);
    const WarpField ref = homography_to_warp(pair.h, make_grid(pred.shape.height, pred.shape.width));
    const auto mask = reference_mask(ref);
    rep.pck1 = pck(pred, ref, mask, 1.0, pixels);
    rep.pck3 = pck(pred, ref, mask, 3.0, pixels);
    rep.pck5 = pck(pred, ref, mask, 5.0, pixels);
    rep.aepe = aepe(pred, ref, mask, pixels);
    double conf = 0.0;
    for (double c : pred.confidence) conf += c;
    rep.mean_confidence = pred.size() ? conf / static_cast<double>(pred.size()) : 0.0;
    rep.ok = true;

    try {
      // Clipped out-of-image predictions carry zero confidence; keep them out of the fit.
      auto matches = sparsify_topk(pred, cfg.topk);
      std::erase_if(matches, [](const Match& m) { return m.confidence <= 0.0; });
      const double thresh = cfg.ransac_thresh_px * 2.0 /
                            static_cast<double>(std::max(src.width, src.height));
      const RansacResult rr = ransac_homography(matches, cfg.ransac_iterations, thresh,
                                                substream_seed(rep.seed, "ransac"));
      rep.homography_error_px = corner_error_px(rr.h, pair.h, pixels);
      rep.homography_ok = std::isfinite(rep.homography_error_px);
    } catch (const Error& e) {
      rep.homography_error_px = std::numeric_limits<double>::quiet_NaN();
      rep.error = e.what();
    }
  } catch (const Error& e) {
    rep.ok = false;
    rep.error = e.what();
  }
  return rep;
}

}  // namespace

BenchmarkReport run_benchmark(std::span<const Image> images, const BenchmarkConfig& cfg,
                              const PipelineConfig& pipeline) {
  if (cfg.pairs == 0) throw InvalidArgument("benchmark needs at least one pair");
  if (cfg.image_size < 32) throw InvalidArgument("benchmark image size must be at least 32");
  cfg.synth.validate();
  pipeline.validate();

  std::vector<Image> textures;
  if (images.empty()) {
    textures.resize(cfg.pairs);
    parallel_for(cfg.pairs, [&](std::size_t i) {
      textures[i] = procedural_texture(cfg.image_size, cfg.image_size,
                                       substream_seed(cfg.seed, "texture:" + std::to_string(i)));
    });
    images = textures;
  }

  BenchmarkReport report;
  report.pairs.resize(cfg.pairs);
  parallel_for(cfg.pairs, [&](std::size_t i) {
    report.pairs[i] = run_pair(images[i % images.size()], i, cfg, pipeline);
  });

  std::vector<double> p1, p3, p5, ae, he;
  for (const auto& p : report.pairs) {
    if (!p.ok) {
      ++report.failures;
      continue;
    }
    p1.push_back(p.pck1);
    p3.push_back(p.pck3);
    p5.push_back(p.pck5);
    ae.push_back(p.aepe);
    if (p.homography_ok) he.push_back(p.homography_error_px);
  }
  report.mean_pck1 = mean(p1);
  report.mean_pck3 = mean(p3);
  report.mean_pck5 = mean(p5);
  report.mean_aepe = mean(ae);
  report.median_pck1 = median(p1);
  report.median_pck3 = median(p3);
  report.median_pck5 = median(p5);
  report.median_aepe = median(ae);
  report.median_homography_error_px = median(he);
  return report;
}

void write_benchmark_report(const BenchmarkReport& report, const BenchmarkConfig& cfg,
                            const PipelineConfig& pipeline, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());

  std::ostringstream csv;
  csv << "pair,seed,ok,pck1,pck3,pck5,aepe,homography_error_px,mean_confidence,error\n";
  for (const auto& p : report.pairs) {
    std::string err = p.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    csv << p.index << ',' << p.seed << ',' << (p.ok ? 1 : 0) << ',' << fmt(p.pck1) << ','
        << fmt(p.pck3) << ',' << fmt(p.pck5) << ',' << fmt(p.aepe) << ','
        << fmt(p.homography_error_px) << ',' << fmt(p.mean_confidence) << ',' << err << '\n';
  }
  const char* kind = cfg.pipeline == BenchPipeline::Matcher  ? "matcher"
                     : cfg.pipeline == BenchPipeline::Oracle ? "oracle"
                                                             : "identity";
  std::ostringstream sum;
  sum << "pipeline = " << kind << '\n'
      << "pairs = " << cfg.pairs << '\n'
      << "image_size = " << cfg.image_size << '\n'
      << "bench_seed = " << cfg.seed << '\n'
      << "failures = " << report.failures << '\n'
      << "evaluation_grid = finest computed stride, flow clipped to the image\n"
      << "mean_pck1 = " << fmt(report.mean_pck1) << '\n'
      << "mean_pck3 = " << fmt(report.mean_pck3) << '\n'
      << "mean_pck5 = " << fmt(report.mean_pck5) << '\n'
      << "mean_aepe = " << fmt(report.mean_aepe) << '\n'
      << "median_pck1 = " << fmt(report.median_pck1) << '\n'
      << "median_pck3 = " << fmt(report.median_pck3) << '\n'
      << "median_pck5 = " << fmt(report.median_pck5) << '\n'
      << "median_aepe = " << fmt(report.median_aepe) << '\n'
      << "median_homography_error_px = " << fmt(report.median_homography_error_px) << '\n'
      << "# pipeline configuration\n"
      << pipeline.to_text();

  const std::filesystem::path base(dir);
  for (const auto& [name, text] :
       {std::pair{std::string("pairs.csv"), csv.str()}, std::pair{std::string("summary.txt"), sum.str()}}) {
    std::ofstream f(base / name, std::ios::binary);
    if (!f) throw IoError("cannot open " + (base / name).string() + " for writing");
    f << text;
    if (!f) throw IoError("write failed for " + (base / name).string());
  }
}

}  // namespace dkm
