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


#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "dkm/dkm.h"
#include "support/oracles.hpp"

namespace {

std::string config_text(const dkm_config* cfg) {
  size_t needed = 0;
  REQUIRE(dkm_config_to_text(cfg, nullptr, 0, &needed) == DKM_OK);
  std::string buf(needed, '\0');
  REQUIRE(dkm_config_to_text(cfg, buf.data(), buf.size(), &needed) == DKM_OK);
  buf.resize(needed - 1);
  return buf;
}

}  // namespace

TEST_CASE("status strings and last error") {
  CHECK(std::strlen(dkm_version()) > 0);
  CHECK(std::string(dkm_status_string(DKM_OK)) != std::string(dkm_status_string(DKM_ERR_IO)));
  dkm_image* img = nullptr;
  CHECK(dkm_image_load("/nonexistent/x.pgm", &img) == DKM_ERR_IO);
  CHECK(img == nullptr);
  CHECK(std::string(dkm_last_error()).find("/nonexistent/x.pgm") != std::string::npos);
  CHECK(dkm_image_texture(16, 16, 1, &img) == DKM_OK);
  CHECK(std::string(dkm_last_error()).empty());
  dkm_image_destroy(img);
  dkm_image_destroy(nullptr);
  CHECK(dkm_image_texture(16, 16, 1, nullptr) == DKM_ERR_INVALID_ARGUMENT);
  CHECK(dkm_substream_seed(3, "basis") == dkm_substream_seed(3, "basis"));
  CHECK(dkm_substream_seed(3, "basis") != dkm_substream_seed(3, "noise"));
}

TEST_CASE("config handle and buffer protocol") {
  dkm_config* cfg = nullptr;
  REQUIRE(dkm_config_create(&cfg) == DKM_OK);
  CHECK(dkm_config_validate(cfg) == DKM_OK);
  CHECK(dkm_config_set(cfg, "tau", "0.5") == DKM_OK);
  CHECK(dkm_config_set(cfg, "nope", "1") == DKM_ERR_CONFIG);
  CHECK(std::string(dkm_last_error()).find("nope") != std::string::npos);
  CHECK(dkm_config_set(cfg, "tau", "0.01") == DKM_OK);
  CHECK(dkm_config_validate(cfg) == DKM_ERR_CONFIG);
  CHECK(dkm_config_set(cfg, "tau", "0.5") == DKM_OK);

  size_t needed = 0;
  char small[4] = {'x', 'x', 'x', 'x'};
  CHECK(dkm_config_get(cfg, "tau", small, sizeof small, &needed) == DKM_OK);
  CHECK(needed == 4);
  CHECK(std::string(small) == "0.5");
  char tiny[2];
  CHECK(dkm_config_get(cfg, "regressor", tiny, sizeof tiny, &needed) == DKM_OK);
  CHECK(needed == 3);
  CHECK(std::string(tiny) == "g");  // truncated, still terminated
  CHECK(dkm_config_get(cfg, "missing", tiny, sizeof tiny, &needed) == DKM_ERR_CONFIG);

  const std::string text = config_text(cfg);
  CHECK(text.find("tau = 0.5\n") != std::string::npos);
  CHECK(dkm_config_key_count() > 10);
  for (size_t i = 0; i < dkm_config_key_count(); ++i) {
    const std::string k = dkm_config_key(i);
    CHECK(text.find(k + " = ") != std::string::npos);
  }
  CHECK(dkm_config_key(dkm_config_key_count()) == nullptr);

  const auto dir = oracle::temp_dir("capi_config");
  oracle::spit(dir / "c.cfg", text);
  dkm_config* again = nullptr;
  REQUIRE(dkm_config_create(&again) == DKM_OK);
  CHECK(dkm_config_load_file(again, (dir / "c.cfg").c_str()) == DKM_OK);
  CHECK(config_text(again) == text);
  dkm_config_destroy(again);
  dkm_config_destroy(cfg);
}

TEST_CASE("threads") {
  const int saved = dkm_get_threads();
  CHECK(dkm_set_threads(3) == DKM_OK);
  CHECK(dkm_get_threads() == 3);
  CHECK(dkm_set_threads(0) == DKM_ERR_INVALID_ARGUMENT);
  CHECK(dkm_set_threads(saved) == DKM_OK);
}

TEST_CASE("images, features and warps") {
  std::vector<double> px(8 * 12, 0.25);
  dkm_image* img = nullptr;
  REQUIRE(dkm_image_create(8, 12, 1, px.data(), &img) == DKM_OK);
  size_t h = 0, w = 0, c = 0;
  CHECK(dkm_image_shape(img, &h, &w, &c) == DKM_OK);
  CHECK((h == 8 && w == 12 && c == 1));
  px[0] = NAN;
  dkm_image* bad = nullptr;
  CHECK(dkm_image_create(8, 12, 1, px.data(), &bad) == DKM_ERR_INVALID_ARGUMENT);
  dkm_image_destroy(img);

  dkm_image* tex = nullptr;
  REQUIRE(dkm_image_texture(64, 64, 9, &tex) == DKM_OK);
  const auto dir = oracle::temp_dir("capi_images");
  CHECK(dkm_image_save(tex, (dir / "t.pgm").c_str()) == DKM_OK);
  dkm_image* loaded = nullptr;
  CHECK(dkm_image_load((dir / "t.pgm").c_str(), &loaded) == DKM_OK);
  dkm_image_destroy(loaded);

  dkm_features* fm = nullptr;
  REQUIRE(dkm_features_extract(tex, 16, &fm) == DKM_OK);
  dkm_feature_info info{};
  CHECK(dkm_features_info(fm, &info) == DKM_OK);
  CHECK(info.height == 4);
  CHECK(info.width == 4);
  CHECK(info.stride == 16);
  CHECK(info.normalized == 1);
  CHECK(info.max_norm == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(dkm_features_save(fm, (dir / "f.dkfm").c_str()) == DKM_OK);
  dkm_features* back = nullptr;
  CHECK(dkm_features_load((dir / "f.dkfm").c_str(), &back) == DKM_OK);
  dkm_features_destroy(back);
  oracle::spit(dir / "junk.dkfm", "JUNKJUNKJUNK");
  CHECK(dkm_features_load((dir / "junk.dkfm").c_str(), &back) == DKM_ERR_FORMAT);
  dkm_features_destroy(fm);
  dkm_image_destroy(tex);

  dkm_warp* warp = nullptr;
  REQUIRE(dkm_warp_identity(4, 5, &warp) == DKM_OK);
  CHECK(dkm_warp_shape(warp, &h, &w) == DKM_OK);
  CHECK((h == 4 && w == 5));
  double xyc[3];
  CHECK(dkm_warp_get(warp, 0, xyc) == DKM_OK);
  CHECK(xyc[0] == doctest::Approx(-0.8));
  CHECK(xyc[1] == doctest::Approx(-0.75));
  CHECK(dkm_warp_get(warp, 20, xyc) == DKM_ERR_INVALID_ARGUMENT);
  const double set[3] = {0.1, 0.2, 0.3};
  CHECK(dkm_warp_set(warp, 7, set) == DKM_OK);
  CHECK(dkm_warp_get(warp, 7, xyc) == DKM_OK);
  CHECK(xyc[2] == 0.3);
  CHECK(dkm_warp_save(warp, (dir / "w.dkwf").c_str()) == DKM_OK);
  dkm_warp* wb = nullptr;
  CHECK(dkm_warp_load((dir / "w.dkwf").c_str(), &wb) == DKM_OK);
  CHECK(dkm_warp_get(wb, 7, xyc) == DKM_OK);
  CHECK(xyc[0] == doctest::Approx(0.1).epsilon(1e-7));  // stored as float32
  dkm_warp_destroy(wb);
  CHECK(dkm_warp_write_topk(warp, 3, (dir / "m.txt").c_str()) == DKM_OK);
  const std::string m = oracle::slurp(dir / "m.txt");
  CHECK(std::count(m.begin(), m.end(), '\n') == 3);
  CHECK(dkm_warp_write_topk(warp, 0, (dir / "m.txt").c_str()) == DKM_ERR_INVALID_ARGUMENT);
  dkm_warp_destroy(warp);
}

TEST_CASE("bases through the C interface") {
  dkm_basis* b = nullptr;
  CHECK(dkm_basis_sample("wavelet", 16, 1.0, 0, &b) == DKM_ERR_INVALID_ARGUMENT);
  REQUIRE(dkm_basis_sample("identity", 2, 1.0, 0, &b) == DKM_OK);
  const double x[2] = {0.3, -0.2}, y[2] = {0.5, 0.4};
  double k = 0;
  CHECK(dkm_basis_kernel(b, x, y, &k) == DKM_OK);
  CHECK(k == doctest::Approx(0.3 * 0.5 - 0.2 * 0.4));
  dkm_basis_destroy(b);

  REQUIRE(dkm_basis_sample("fourier", 2048, 1.0, 5, &b) == DKM_OK);
  double dev = 1;
  CHECK(dkm_basis_limit_deviation(b, 100, 1, &dev) == DKM_OK);
  CHECK(dev < 0.05);
  const auto dir = oracle::temp_dir("capi_basis");
  CHECK(dkm_basis_save(b, (dir / "b.bin").c_str()) == DKM_OK);
  dkm_basis* c = nullptr;
  CHECK(dkm_basis_load((dir / "b.bin").c_str(), &c) == DKM_OK);
  double k1 = 0, k2 = 0;
  dkm_basis_kernel(b, x, y, &k1);
  dkm_basis_kernel(c, x, y, &k2);
  CHECK(k1 == k2);
  CHECK(k1 == doctest::Approx(std::exp(-0.5 * (0.04 + 0.36))).epsilon(0.1));
  dkm_basis_destroy(c);
  dkm_basis_destroy(b);
}

TEST_CASE("matching and metrics through the C interface") {
  dkm_image* tex = nullptr;
  REQUIRE(dkm_image_texture(128, 128, 4, &tex) == DKM_OK);
  dkm_config* cfg = nullptr;
  REQUIRE(dkm_config_create(&cfg) == DKM_OK);
  dkm_warp* warp = nullptr;
  dkm_match_summary s{};
  REQUIRE(dkm_match_images(tex, tex, cfg, &warp, &s) == DKM_OK);
  CHECK(s.stride == 4);
  CHECK(s.warp_height == 32);
  CHECK(s.mean_confidence > 0.5);

  dkm_warp* ref = nullptr;
  REQUIRE(dkm_warp_identity(32, 32, &ref) == DKM_OK);
  const double thr[2] = {1.0, 2.0};
  double prec[2] = {0, 0};
  dkm_metrics m{};
  REQUIRE(dkm_metrics_compute(warp, ref, 128, 128, thr, 2, &m, prec) == DKM_OK);
  CHECK(m.valid == 32 * 32);
  CHECK(m.aepe < 1.0);
  CHECK(prec[0] == m.pck1);
  CHECK(prec[1] >= prec[0]);

  REQUIRE(dkm_metrics_compute(ref, ref, 128, 128, nullptr, 0, &m, nullptr) == DKM_OK);
  CHECK(m.pck1 == 1.0);
  CHECK(m.aepe == 0.0);
  CHECK(m.auc5 == 1.0);

  dkm_warp* other = nullptr;
  REQUIRE(dkm_warp_identity(16, 16, &other) == DKM_OK);
  CHECK(dkm_metrics_compute(other, ref, 128, 128, nullptr, 0, &m, nullptr) ==
        DKM_ERR_INVALID_ARGUMENT);

  dkm_features *fq = nullptr, *fs = nullptr;
  REQUIRE(dkm_features_extract(tex, 16, &fq) == DKM_OK);
  REQUIRE(dkm_features_extract(tex, 16, &fs) == DKM_OK);
  dkm_warp* fw = nullptr;
  CHECK(dkm_match_features(fq, fs, cfg, &fw, &s) == DKM_OK);
  CHECK(s.warp_height == 8);
  dkm_warp_destroy(fw);
  dkm_features_destroy(fq);
  dkm_features_destroy(fs);

  dkm_warp_destroy(other);
  dkm_warp_destroy(ref);
  dkm_warp_destroy(warp);
  dkm_config_destroy(cfg);
  dkm_image_destroy(tex);
}

TEST_CASE("toy and benchmark through the C interface") {
  dkm_toy_config t;
  dkm_toy_defaults(&t);
  CHECK(t.n == 100);
  dkm_toy_stats st{};
  const auto dir = oracle::temp_dir("capi_toy");
  REQUIRE(dkm_toy_run(&t, (dir / "a.csv").c_str(), &st) == DKM_OK);
  REQUIRE(dkm_toy_run(&t, (dir / "b.csv").c_str(), &st) == DKM_OK);
  CHECK(oracle::slurp(dir / "a.csv") == oracle::slurp(dir / "b.csv"));
  CHECK(st.gp_transition_width <= st.attention_transition_width);
  CHECK(st.gp_rmse < 2.0 * std::sqrt(t.noise_variance));
  t.weight_first = 0.5;
  CHECK(dkm_toy_run(&t, nullptr, &st) == DKM_ERR_INVALID_ARGUMENT);

  dkm_benchmark_config b;
  dkm_benchmark_defaults(&b);
  b.pairs = 3;
  b.image_size = 128;
  b.pipeline = DKM_BENCH_ORACLE;
  dkm_benchmark_summary sum{};
  double per[3];
  REQUIRE(dkm_benchmark_run(&b, nullptr, nullptr, 0, nullptr, &sum, per) == DKM_OK);
  CHECK(sum.pairs == 3);
  CHECK(sum.failures == 0);
  CHECK(sum.median_pck1 == 1.0);
  CHECK(sum.median_aepe == 0.0);
  for (double v : per) CHECK(v == 1.0);
  b.pairs = 0;
  CHECK(dkm_benchmark_run(&b, nullptr, nullptr, 0, nullptr, &sum, nullptr) ==
        DKM_ERR_INVALID_ARGUMENT);
}
