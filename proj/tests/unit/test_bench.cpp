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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "dkm/bench.hpp"
#include "dkm/error.hpp"
#include "dkm/metrics.hpp"
#include "support/oracles.hpp"

using namespace dkm;

namespace {

SynthPairConfig still_config() {
  SynthPairConfig c;
  c.max_rotation_deg = 0;
  c.min_scale = c.max_scale = 1;
  c.max_translation = 0;
  c.max_perspective = 0;
  c.min_brightness = c.max_brightness = 0;
  c.min_contrast = c.max_contrast = 1;
  c.min_gamma = c.max_gamma = 1;
  c.noise_std = 0;
  return c;
}

Vec2 naive_apply(const Mat3& m, const Vec2& x) {
  const double w = m(2, 0) * x.x() + m(2, 1) * x.y() + m(2, 2);
  return {(m(0, 0) * x.x() + m(0, 1) * x.y() + m(0, 2)) / w,
          (m(1, 0) * x.x() + m(1, 1) * x.y() + m(1, 2)) / w};
}

double transfer_error(const Homography& h, const Homography& truth, std::span<const Vec2> pts) {
  double worst = 0;
  for (const Vec2& p : pts) {
    Vec2 a, b;
    h.apply(p, a);
    truth.apply(p, b);
    worst = std::max(worst, (a - b).norm());
  }
  return worst;
}

std::vector<Vec2> uniform_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec2> p;
  for (std::size_t i = 0; i < n; ++i) p.emplace_back(u(rng), u(rng));
  return p;
}

}  // namespace

TEST_CASE("toy samples") {
  ToyConfig cfg;
  cfg.seed = 4;
  const auto a = toy_sample(cfg);
  const auto b = toy_sample(cfg);
  REQUIRE(a.size() == 100);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
    CHECK(a[i].branch == b[i].branch);
  }

  cfg.n = 100000;
  const auto big = toy_sample(cfg);
  std::size_t first = 0;
  double resid = 0;
  for (const auto& s : big) {
    if (s.branch == 1) {
      ++first;
      CHECK(s.x >= 0.0);
      CHECK(s.x <= 0.5);
      resid += (s.y - s.x) * (s.y - s.x);
    } else {
      CHECK(s.branch == 2);
      CHECK(s.x >= 0.4);
      CHECK(s.x <= 1.0);
    }
  }
  CHECK(std::abs(static_cast<double>(first) / 1e5 - 0.8) <= 0.01);
  // Branch noise has variance 0.1.
  CHECK(resid / static_cast<double>(first) == doctest::Approx(0.1).epsilon(0.03));

  ToyConfig bad;
  bad.weight_first = 0.7;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = ToyConfig{};
  bad.n = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("toy run on a singleton support") {
  ToyConfig cfg;
  cfg.jitter = 1e-8;
  const std::vector<ToySample> one{{0.2, 0.2, 1}};
  const ToyCurves c = toy_run(one, cfg);
  REQUIRE(c.x.size() == kToyQueryPoints);
  CHECK(c.x.front() == 0.0);
  CHECK(c.x.back() == 1.0);
  const auto it = std::min_element(c.x.begin(), c.x.end(),
                                   [](double a, double b) { return std::abs(a - 0.2) < std::abs(b - 0.2); });
  const auto i = static_cast<std::size_t>(it - c.x.begin());
  CHECK(c.gp_mean[i] == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(c.attention[i] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(c.nearest[i] == 0.2);
  CHECK(c.support_count[i] == 1);
  CHECK(std::accumulate(c.support_count.begin(), c.support_count.end(), std::size_t{0}) == 1);
}

TEST_CASE("toy run: dense-region accuracy and sharper GP transition") {
  ToyConfig cfg;
  const auto s = toy_sample(cfg);
  const ToyCurves c = toy_run(s, cfg);
  const double bound = 2.0 * std::sqrt(cfg.noise_variance);
  CHECK(branch_rmse(c.x, c.gp_mean, 0, 0.35) < bound);
  CHECK(branch_rmse(c.x, c.attention, 0, 0.35) < bound);
  CHECK(transition_width(c.x, c.gp_mean) <= transition_width(c.x, c.attention));
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    CHECK(std::isfinite(c.gp_mean[i]));
    CHECK(c.gp_var[i] >= 0.0);
  }
  CHECK(toy_csv(c) == toy_csv(toy_run(s, cfg)));
  CHECK(toy_csv(c).rfind("x,gp_mean,gp_var,attn,nn,support\n", 0) == 0);
}

TEST_CASE("toy GP predictions stay finite for many seeds") {
  ToyConfig cfg;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    cfg.seed = seed;
    const ToyCurves c = toy_run(toy_sample(cfg), cfg);
    bool finite = true;
    for (double v : c.gp_mean) finite &= std::isfinite(v);
    REQUIRE(finite);
  }
}

TEST_CASE("transition width on hand-made curves") {
  std::vector<double> x(101), step(101), ramp(101);
  for (int i = 0; i <= 100; ++i) {
    x[static_cast<std::size_t>(i)] = i / 100.0;
    step[static_cast<std::size_t>(i)] = i < 50 ? x[static_cast<std::size_t>(i)] : -x[static_cast<std::size_t>(i)];
    // u falls linearly from 1 at x = 0.4 to -1 at x = 0.6
    const double u = std::clamp(1.0 - (x[static_cast<std::size_t>(i)] - 0.4) * 10.0, -1.0, 1.0);
    ramp[static_cast<std::size_t>(i)] = u * x[static_cast<std::size_t>(i)];
  }
  CHECK(transition_width(x, step) == doctest::Approx(0.01));
  // u from 0.8 to -0.8, then 0.5 to -0.5; widths are resolved to one sample step
  CHECK(std::abs(transition_width(x, ramp) - 0.16) <= 0.0101);
  CHECK(std::abs(transition_width(x, ramp, 0.5) - 0.10) <= 0.0101);
  CHECK(std::isinf(transition_width(x, x)));
  CHECK(branch_rmse(x, x, 0, 1) == 0.0);
}

TEST_CASE("procedural textures") {
  const Image a = procedural_texture(64, 80, 1);
  const Image b = procedural_texture(64, 80, 1);
  const Image c = procedural_texture(64, 80, 2);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(*std::min_element(a.values.begin(), a.values.end()) == 0.0);
  CHECK(*std::max_element(a.values.begin(), a.values.end()) == 1.0);
}

TEST_CASE("synthetic pairs") {
  const Image img = procedural_texture(64, 64, 3);

  const SynthPair still = synth_pair(img, still_config(), 5);
  for (std::size_t i = 0; i < img.values.size(); ++i)
    CHECK(still.warped.values[i] == doctest::Approx(img.values[i]).epsilon(1e-12));
  const NormalizedGrid g = make_grid(64, 64);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK((still.reference.flow[i] - g.coords[i]).norm() < 1e-12);

  SynthPairConfig shift = still_config();
  shift.max_translation = 0.2;
  const SynthPair moved = synth_pair(img, shift, 6);
  const Vec2 d = moved.reference.flow[0] - g.coords[0];
  CHECK(d.norm() > 0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK((moved.reference.flow[i] - g.coords[i] - d).norm() < 1e-12);

  const SynthPairConfig full;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SynthPair p = synth_pair(img, full, seed);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK((p.reference.flow[i] - naive_apply(p.h.matrix(), g.coords[i])).norm() < 1e-9);
    for (double v : p.warped.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    // Same seed, same pair.
    CHECK(synth_pair(img, full, seed).warped.values == p.warped.values);
  }

  SynthPairConfig bad;
  bad.min_scale = 1.3;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("reference warps respect homography composition") {
  const SynthPairConfig cfg;
  const Homography a = sample_homography(cfg, 1), b = sample_homography(cfg, 2);
  const NormalizedGrid g = make_grid(32, 32);
  const WarpField direct = homography_to_warp(compose(a, b), g);
  const WarpField wb = homography_to_warp(b, g);
  const ProjectedPoints chained = apply_homography(a, wb.flow);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK((direct.flow[i] - chained.points[i]).norm() < 1e-9);
}

TEST_CASE("DLT and RANSAC") {
  const Homography truth = sample_homography(SynthPairConfig{}, 11);
  const auto src = uniform_points(20, 1);
  std::vector<Vec2> dst(20);
  std::vector<Match> matches;
  for (std::size_t i = 0; i < 20; ++i) {
    truth.apply(src[i], dst[i]);
    matches.push_back({src[i], dst[i], 1.0});
  }
  const auto probe = uniform_points(200, 2);
  CHECK(transfer_error(dlt_homography(src, dst), truth, probe) < 1e-9);
  CHECK(transfer_error(dlt_homography(std::span(src).first(4), std::span(dst).first(4)), truth, probe) < 1e-6);
  CHECK_THROWS_AS(dlt_homography(std::span(src).first(3), std::span(dst).first(3)), InvalidArgument);

  const RansacResult exact = ransac_homography(matches, 100, 0.01, 3);
  CHECK(exact.inlier_count == 20);
  for (auto v : exact.inliers) CHECK(v == 1);
  double sym = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    Vec2 fwd, back;
    exact.h.apply(src[i], fwd);
    exact.h.inverse().apply(dst[i], back);
    sym = std::max(sym, (fwd - dst[i]).norm() + (back - src[i]).norm());
  }
  CHECK(sym < 1e-6);

  CHECK_THROWS_AS(ransac_homography(std::span(matches).first(3), 100, 0.01, 3), EstimationFailure);
}

TEST_CASE("RANSAC with half the matches corrupted") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  std::normal_distribution<double> n(0, 0.002);
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const Homography truth = sample_homography(SynthPairConfig{}, 100 + trial);
    std::vector<Match> m;
    std::vector<int> is_inlier;
    for (int i = 0; i < 200; ++i) {
      const Vec2 q(u(rng), u(rng));
      Vec2 s;
      truth.apply(q, s);
      if (i % 2 == 0) {
        m.push_back({q, s + Vec2(n(rng), n(rng)), 1.0});
        is_inlier.push_back(1);
      } else {
        m.push_back({q, Vec2(u(rng), u(rng)), 1.0});
        is_inlier.push_back(0);
      }
    }
    const RansacResult r = ransac_homography(m, 200, 0.02, trial);
    std::size_t found = 0;
    for (std::size_t i = 0; i < m.size(); ++i) found += (is_inlier[i] && r.inliers[i]) ? 1 : 0;
    CHECK(static_cast<double>(found) / 100.0 >= 0.95);

    // Re-seeded runs over permuted lists find as many inliers.
    for (int p = 0; p < 5; ++p) {
      std::vector<Match> perm = m;
      std::shuffle(perm.begin(), perm.end(), rng);
      const RansacResult rp = ransac_homography(perm, 200, 0.02, trial);
      CHECK(rp.inlier_count >= r.inlier_count);
    }
  }
}

TEST_CASE("corner error") {
  const Homography h = sample_homography(SynthPairConfig{}, 4);
  CHECK(corner_error_px(h, h, {256, 256}) < 1e-9);
  CHECK(corner_error_px(Homography::translation(0.02, 0), Homography(), {256, 256}) ==
        doctest::Approx(2.56));
}

TEST_CASE("benchmark with oracle and identity pipelines") {
  BenchmarkConfig cfg;
  cfg.pairs = 4;
  cfg.image_size = 128;
  cfg.seed = 7;
  PipelineConfig pipe;
  cfg.pipeline = BenchPipeline::Oracle;
  const BenchmarkReport oracle_run = run_benchmark({}, cfg, pipe);
  CHECK(oracle_run.failures == 0);
  for (const auto& p : oracle_run.pairs) {
    CHECK(p.ok);
    CHECK(p.pck1 == 1.0);
    CHECK(p.aepe == 0.0);
    CHECK(p.homography_ok);
    CHECK(p.homography_error_px < 1e-3);
  }

  cfg.pipeline = BenchPipeline::Identity;
  const BenchmarkReport id = run_benchmark({}, cfg, pipe);
  const std::size_t stride = *std::min_element(pipe.refine_strides.begin(), pipe.refine_strides.end());
  const std::size_t cells = cfg.image_size / stride;
  const NormalizedGrid g = make_grid(cells, cells);
  for (std::size_t i = 0; i < cfg.pairs; ++i) {
    const Image tex = procedural_texture(cfg.image_size, cfg.image_size,
                                         substream_seed(cfg.seed, "texture:" + std::to_string(i)));
    const SynthPair sp = synth_pair(tex, cfg.synth, id.pairs[i].seed);
    double sum = 0;
    std::size_t n = 0;
    for (const Vec2& c : g.coords) {
      const Vec2 t = naive_apply(sp.h.matrix(), c);
      if (std::abs(t.x()) > 1 || std::abs(t.y()) > 1) continue;
      sum += ((t - c) * (cfg.image_size / 2.0)).norm();
      ++n;
    }
    CHECK(id.pairs[i].aepe == doctest::Approx(sum / static_cast<double>(n)).epsilon(1e-9));
  }

  // Per-seed determinism.
  const BenchmarkReport again = run_benchmark({}, cfg, pipe);
  for (std::size_t i = 0; i < cfg.pairs; ++i) CHECK(again.pairs[i].aepe == id.pairs[i].aepe);

  const auto dir = oracle::temp_dir("bench_report");
  write_benchmark_report(id, cfg, pipe, dir.string());
  const std::string csv = oracle::slurp(dir / "pairs.csv");
  CHECK(csv.rfind("pair,seed,ok,pck1,pck3,pck5,aepe,homography_error_px,mean_confidence,error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(oracle::slurp(dir / "summary.txt").find("median_pck5 = ") != std::string::npos);
}

TEST_CASE("benchmark records failures instead of aborting") {
  BenchmarkConfig cfg;
  cfg.pairs = 2;
  cfg.image_size = 64;
  PipelineConfig pipe;
  pipe.strides = {64};  // a 64 px texture is too small for stride-64 descriptors
  pipe.refine_strides = {};
  const BenchmarkReport r = run_benchmark({}, cfg, pipe);
  CHECK(r.failures == 2);
  for (const auto& p : r.pairs) {
    CHECK_FALSE(p.ok);
    CHECK_FALSE(p.error.empty());
  }
}
