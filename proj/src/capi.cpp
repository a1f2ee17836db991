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

#include "dkm/dkm.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "dkm/bench.hpp"
#include "dkm/config.hpp"
#include "dkm/embedding.hpp"
#include "dkm/error.hpp"
#include "dkm/features.hpp"
#include "dkm/geometry.hpp"
#include "dkm/metrics.hpp"
#include "dkm/parallel.hpp"
#include "dkm/pipeline.hpp"

struct dkm_config {
  dkm::PipelineConfig value;
};
struct dkm_image {
  dkm::Image value;
};
struct dkm_features {
  dkm::FeatureMap value;
};
struct dkm_warp {
  dkm::WarpField value;
};
struct dkm_basis {
  dkm::EmbeddingBasis value;
};

namespace {

thread_local std::string t_last_error;

dkm_status fail(dkm_status s, const std::string& msg) {
  t_last_error = msg;
  return s;
}

template <class F>
dkm_status guarded(F&& f) {
  try {
    f();
    t_last_error.clear();
    return DKM_OK;
  } catch (const dkm::Error& e) {
    return fail(static_cast<dkm_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(DKM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DKM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DKM_ERR_INTERNAL, "unknown failure");
  }
}

void require(const void* p, const char* name) {
  if (!p) throw dkm::InvalidArgument(std::string(name) + " must not be null");
}

template <class Handle, class T>
void emit(Handle** out, T&& v) {
  *out = new Handle{std::forward<T>(v)};
}

void copy_out(const std::string& text, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buf && cap > 0) {
    const std::size_t n = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
}

void fill_summary(const dkm::MatchResult& r, dkm_match_summary* s) {
  if (!s) return;
  s->mean_confidence = r.summary.mean_confidence;
  s->mean_modes = r.summary.mean_modes;
  s->multimodal_fraction = r.summary.multimodal_fraction;
  s->degenerate = r.summary.degenerate;
  s->least_squares_solves = r.summary.least_squares_solves;
  s->max_jitter = r.summary.max_jitter;
  s->stride = r.stride;
  s->warp_height = r.warp.shape.height;
  s->warp_width = r.warp.shape.width;
}

}  // namespace

extern "C" {

const char* dkm_version(void) { return "1.0.0"; }

const char* dkm_last_error(void) { return t_last_error.c_str(); }

const char* dkm_status_string(dkm_status status) {
  switch (status) {
    case DKM_OK: return "ok";
    case DKM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DKM_ERR_NUMERICAL: return "numerical failure";
    case DKM_ERR_FORMAT: return "format error";
    case DKM_ERR_IO: return "i/o error";
    case DKM_ERR_ESTIMATION: return "estimation failure";
    case DKM_ERR_UNDEFINED: return "undefined result";
    case DKM_ERR_CONFIG: return "configuration error";
    case DKM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

uint64_t dkm_substream_seed(uint64_t seed, const char* name) {
  return dkm::substream_seed(seed, name ? name : "");
}

dkm_status dkm_set_threads(int n) {
  return guarded([&] {
    if (n < 1) throw dkm::InvalidArgument("thread count must be at least 1");
    dkm::set_num_threads(n);
  });
}

int dkm_get_threads(void) { return dkm::num_threads(); }

// ---- config

dkm_status dkm_config_create(dkm_config** out) {
  return guarded([&] {
    require(out, "out");
    emit(out, dkm::PipelineConfig{});
  });
}

void dkm_config_destroy(dkm_config* cfg) { delete cfg; }

dkm_status dkm_config_set(dkm_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    cfg->value.set(key, value);
  });
}

dkm_status dkm_config_load_file(dkm_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "config");
    require(path, "path");
    cfg->value.load_file(path);
  });
}

dkm_status dkm_config_validate(const dkm_config* cfg) {
  return guarded([&] {
    require(cfg, "config");
    cfg->value.validate();
  });
}

dkm_status dkm_config_to_text(const dkm_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(cfg, "config");
    copy_out(cfg->value.to_text(), buf, cap, needed);
  });
}

dkm_status dkm_config_get(const dkm_config* cfg, const char* key, char* buf, size_t cap,
                          size_t* needed) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    const std::string text = cfg->value.to_text();
    const std::string prefix = std::string(key) + " = ";
    std::size_t pos = 0;
    std::string value;
    bool found = false;
    while (pos < text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      const std::string line = text.substr(pos, end - pos);
      if (line.compare(0, prefix.size(), prefix) == 0) {
        value = line.substr(prefix.size());
        found = true;
        break;
      }
      pos = end + 1;
    }
    if (!found) throw dkm::ConfigError(std::string("unknown config key '") + key + "'");
    copy_out(value, buf, cap, needed);
  });
}

size_t dkm_config_key_count(void) { return dkm::PipelineConfig::keys().size(); }

const char* dkm_config_key(size_t index) {
  const auto& k = dkm::PipelineConfig::keys();
  return index < k.size() ? k[index].c_str() : nullptr;
}

// ---- images

dkm_status dkm_image_load(const char* path, dkm_image** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    emit(out, dkm::load_image(path));
  });
}

dkm_status dkm_image_create(size_t height, size_t width, size_t channels, const double* values,
                            dkm_image** out) {
  return guarded([&] {
    require(values, "values");
    require(out, "out");
    if (height == 0 || width == 0 || (channels != 1 && channels != 3))
      throw dkm::InvalidArgument("image needs positive size and 1 or 3 channels");
    dkm::Image img(height, width, channels);
    for (std::size_t i = 0; i < img.values.size(); ++i) {
      if (!std::isfinite(values[i])) throw dkm::InvalidArgument("non-finite pixel value");
      img.values[i] = std::clamp(values[i], 0.0, 1.0);
    }
    emit(out, std::move(img));
  });
}

dkm_status dkm_image_texture(size_t height, size_t width, uint64_t seed, dkm_image** out) {
  return guarded([&] {
    require(out, "out");
    emit(out, dkm::procedural_texture(height, width, seed));
  });
}

dkm_status dkm_image_save(const dkm_image* img, const char* path) {
  return guarded([&] {
    require(img, "image");
    require(path, "path");
    dkm::save_image(img->value, path);
  });
}

dkm_status dkm_image_shape(const dkm_image* img, size_t* height, size_t* width,
                           size_t* channels) {
  return guarded([&] {
    require(img, "image");
    if (height) *height = img->value.height;
    if (width) *width = img->value.width;
    if (channels) *channels = img->value.channels;
  });
}

void dkm_image_destroy(dkm_image* img) { delete img; }

// ---- features

dkm_status dkm_features_extract(const dkm_image* img, size_t stride, dkm_features** out) {
  return guarded([&] {
    require(img, "image");
    require(out, "out");
    emit(out, dkm::extract_dense_descriptors(img->value, stride));
  });
}

dkm_status dkm_features_load(const char* path, dkm_features** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    emit(out, dkm::load_feature_file(path));
  });
}

dkm_status dkm_features_save(const dkm_features* fm, const char* path) {
  return guarded([&] {
    require(fm, "features");
    require(path, "path");
    dkm::save_feature_file(fm->value, path);
  });
}

dkm_status dkm_features_info(const dkm_features* fm, dkm_feature_info* out) {
  return guarded([&] {
    require(fm, "features");
    require(out, "out");
    const auto& f = fm->value;
    out->height = f.height;
    out->width = f.width;
    out->channels = f.channels;
    out->stride = f.stride;
    out->normalized = f.normalized ? 1 : 0;
    out->zero_cells = 0;
    out->min_norm = std::numeric_limits<double>::infinity();
    out->max_norm = 0.0;
    for (Eigen::Index i = 0; i < f.values.rows(); ++i) {
      if (f.is_zero_cell(static_cast<std::size_t>(i))) {
        ++out->zero_cells;
        continue;
      }
      const double n = f.values.row(i).norm();
      out->min_norm = std::min(out->min_norm, n);
      out->max_norm = std::max(out->max_norm, n);
    }
    if (out->zero_cells == static_cast<std::size_t>(f.values.rows())) out->min_norm = 0.0;
  });
}

void dkm_features_destroy(dkm_features* fm) { delete fm; }

// ---- warps

dkm_status dkm_warp_load(const char* path, dkm_warp** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    emit(out, dkm::load_warp_file(path));
  });
}

dkm_status dkm_warp_save(const dkm_warp* w, const char* path) {
  return guarded([&] {
    require(w, "warp");
    require(path, "path");
    dkm::save_warp_file(w->value, path);
  });
}

dkm_status dkm_warp_identity(size_t height, size_t width, dkm_warp** out) {
  return guarded([&] {
    require(out, "out");
    if (height == 0 || width == 0) throw dkm::InvalidArgument("warp size must be positive");
    emit(out, dkm::identity_warp({height, width}));
  });
}

dkm_status dkm_warp_shape(const dkm_warp* w, size_t* height, size_t* width) {
  return guarded([&] {
    require(w, "warp");
    if (height) *height = w->value.shape.height;
    if (width) *width = w->value.shape.width;
  });
}

dkm_status dkm_warp_get(const dkm_warp* w, size_t index, double xyc[3]) {
  return guarded([&] {
    require(w, "warp");
    require(xyc, "xyc");
    if (index >= w->value.size()) throw dkm::InvalidArgument("warp index out of range");
    xyc[0] = w->value.flow[index].x();
    xyc[1] = w->value.flow[index].y();
    xyc[2] = w->value.confidence[index];
  });
}

dkm_status dkm_warp_set(dkm_warp* w, size_t index, const double xyc[3]) {
  return guarded([&] {
    require(w, "warp");
    require(xyc, "xyc");
    if (index >= w->value.size()) throw dkm::InvalidArgument("warp index out of range");
    w->value.flow[index] = dkm::Vec2(xyc[0], xyc[1]);
    w->value.confidence[index] = xyc[2];
  });
}

dkm_status dkm_warp_write_topk(const dkm_warp* w, size_t k, const char* path) {
  return guarded([&] {
    require(w, "warp");
    require(path, "path");
    dkm::save_matches(dkm::sparsify_topk(w->value, k), path);
  });
}

void dkm_warp_destroy(dkm_warp* w) { delete w; }

// ---- bases

dkm_status dkm_basis_sample(const char* kind, size_t dimension, double ell, uint64_t seed,
                            dkm_basis** out) {
  return guarded([&] {
    require(kind, "kind");
    require(out, "out");
    const dkm::BasisKind k = dkm::parse_basis_kind(kind);
    emit(out, k == dkm::BasisKind::Identity ? dkm::identity_basis()
                                             : dkm::sample_basis(k, dimension, ell, seed));
  });
}

dkm_status dkm_basis_save(const dkm_basis* b, const char* path) {
  return guarded([&] {
    require(b, "basis");
    require(path, "path");
    dkm::save_basis_file(b->value, path);
  });
}

dkm_status dkm_basis_load(const char* path, dkm_basis** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    emit(out, dkm::load_basis_file(path));
  });
}

dkm_status dkm_basis_kernel(const dkm_basis* b, const double x[2], const double y[2],
                            double* out) {
  return guarded([&] {
    require(b, "basis");
    require(x, "x");
    require(y, "y");
    require(out, "out");
    *out = dkm::empirical_kernel(b->value, dkm::Vec2(x[0], x[1]), dkm::Vec2(y[0], y[1]));
  });
}

dkm_status dkm_basis_limit_deviation(const dkm_basis* b, size_t pairs, uint64_t seed,
                                     double* out) {
  return guarded([&] {
    require(b, "basis");
    require(out, "out");
    *out = dkm::limit_deviation(b->value, pairs, seed);
  });
}

void dkm_basis_destroy(dkm_basis* b) { delete b; }

// ---- matching

dkm_status dkm_match_images(const dkm_image* query, const dkm_image* support,
                            const dkm_config* cfg, dkm_warp** out, dkm_match_summary* summary) {
  return guarded([&] {
    require(query, "query");
    require(support, "support");
    require(cfg, "config");
    require(out, "out");
    auto r = dkm::match_images(query->value, support->value, cfg->value);
    fill_summary(r, summary);
    emit(out, std::move(r.warp));
  });
}

dkm_status dkm_match_features(const dkm_features* query, const dkm_features* support,
                              const dkm_config* cfg, dkm_warp** out,
                              dkm_match_summary* summary) {
  return guarded([&] {
    require(query, "query");
    require(support, "support");
    require(cfg, "config");
    require(out, "out");
    auto r = dkm::match_features(query->value, support->value, cfg->value);
    fill_summary(r, summary);
    emit(out, std::move(r.warp));
  });
}

// ---- metrics

dkm_status dkm_metrics_compute(const dkm_warp* pred, const dkm_warp* ref, size_t support_height,
                               size_t support_width, const double* thresholds,
                               size_t n_thresholds, dkm_metrics* out, double* precision) {
  return guarded([&] {
    require(pred, "pred");
    require(ref, "ref");
    require(out, "out");
    if (n_thresholds > 0) require(thresholds, "thresholds");
    const dkm::GridShape px{support_height, support_width};
    const dkm::WarpField clipped = dkm::clip_to_grid(pred->value);
    const auto mask = dkm::reference_mask(ref->value);
    const dkm::ErrorSample e = dkm::endpoint_errors(clipped, ref->value, mask, px);
    dkm_metrics m{};
    m.valid = e.valid_errors().size();
    m.pck1 = dkm::precision_below(e, 1.0);
    m.pck3 = dkm::precision_below(e, 3.0);
    m.pck5 = dkm::precision_below(e, 5.0);
    m.aepe = dkm::aepe(clipped, ref->value, mask, px);
    m.auc5 = dkm::auc(e, 5.0);
    m.auc10 = dkm::auc(e, 10.0);
    m.auc20 = dkm::auc(e, 20.0);
    if (precision && n_thresholds > 0) {
      for (std::size_t i = 0; i < n_thresholds; ++i)
        precision[i] = dkm::precision_below(e, thresholds[i]);
    }
    *out = m;
  });
}

// ---- toy

void dkm_toy_defaults(dkm_toy_config* cfg) {
  if (!cfg) return;
  const dkm::ToyConfig d;
  cfg->n = d.n;
  cfg->kernel_length = d.kernel_length;
  cfg->weight_first = d.weight_first;
  cfg->weight_second = d.weight_second;
  cfg->noise_variance = d.noise_variance;
  cfg->jitter = d.jitter;
  cfg->seed = d.seed;
}

dkm_status dkm_toy_run(const dkm_toy_config* cfg, const char* csv_path, dkm_toy_stats* stats) {
  return guarded([&] {
    require(cfg, "config");
    dkm::ToyConfig t;
    t.n = cfg->n;
    t.kernel_length = cfg->kernel_length;
    t.weight_first = cfg->weight_first;
    t.weight_second = cfg->weight_second;
    t.noise_variance = cfg->noise_variance;
    t.jitter = cfg->jitter;
    t.seed = cfg->seed;
    const auto samples = dkm::toy_sample(t);
    const auto curves = dkm::toy_run(samples, t);
    if (csv_path) dkm::write_toy_csv(curves, csv_path);
    if (stats) {
      stats->gp_transition_width = dkm::transition_width(curves.x, curves.gp_mean);
      stats->attention_transition_width = dkm::transition_width(curves.x, curves.attention);
      stats->gp_rmse = dkm::branch_rmse(curves.x, curves.gp_mean, 0.0, 0.35);
      stats->attention_rmse = dkm::branch_rmse(curves.x, curves.attention, 0.0, 0.35);
      stats->nn_rmse = dkm::branch_rmse(curves.x, curves.nearest, 0.0, 0.35);
    }
  });
}

// ---- benchmark

void dkm_benchmark_defaults(dkm_benchmark_config* cfg) {
  if (!cfg) return;
  const dkm::BenchmarkConfig d;
  cfg->pairs = d.pairs;
  cfg->image_size = d.image_size;
  cfg->max_rotation_deg = d.synth.max_rotation_deg;
  cfg->min_scale = d.synth.min_scale;
  cfg->max_scale = d.synth.max_scale;
  cfg->max_translation = d.synth.max_translation;
  cfg->max_perspective = d.synth.max_perspective;
  cfg->noise_std = d.synth.noise_std;
  cfg->pipeline = DKM_BENCH_MATCHER;
  cfg->topk = d.topk;
  cfg->ransac_iterations = d.ransac_iterations;
  cfg->ransac_thresh_px = d.ransac_thresh_px;
  cfg->seed = d.seed;
}

dkm_status dkm_benchmark_run(const dkm_benchmark_config* cfg, const dkm_config* pipeline,
                             const dkm_image* const* images, size_t n_images,
                             const char* out_dir, dkm_benchmark_summary* out,
                             double* per_pair_pck5) {
  return guarded([&] {
    require(cfg, "benchmark config");
    if (n_images > 0) require(images, "images");
    const dkm::PipelineConfig pipe = pipeline ? pipeline->value : dkm::PipelineConfig{};
    dkm::BenchmarkConfig b;
    b.pairs = cfg->pairs;
    b.image_size = cfg->image_size;
    b.synth.max_rotation_deg = cfg->max_rotation_deg;
    b.synth.min_scale = cfg->min_scale;
    b.synth.max_scale = cfg->max_scale;
    b.synth.max_translation = cfg->max_translation;
    b.synth.max_perspective = cfg->max_perspective;
    b.synth.noise_std = cfg->noise_std;
    switch (cfg->pipeline) {
      case DKM_BENCH_MATCHER: b.pipeline = dkm::BenchPipeline::Matcher; break;
      case DKM_BENCH_ORACLE: b.pipeline = dkm::BenchPipeline::Oracle; break;
      case DKM_BENCH_IDENTITY: b.pipeline = dkm::BenchPipeline::Identity; break;
      default: throw dkm::InvalidArgument("unknown benchmark pipeline");
    }
    b.topk = cfg->topk;
    b.ransac_iterations = cfg->ransac_iterations;
    b.ransac_thresh_px = cfg->ransac_thresh_px;
    b.seed = cfg->seed;

    std::vector<dkm::Image> imgs;
    imgs.reserve(n_images);
    for (std::size_t i = 0; i < n_images; ++i) {
      require(images[i], "image");
      imgs.push_back(images[i]->value);
    }
    const dkm::BenchmarkReport r = dkm::run_benchmark(imgs, b, pipe);
    if (out_dir) dkm::write_benchmark_report(r, b, pipe, out_dir);
    if (out) {
      out->pairs = r.pairs.size();
      out->failures = r.failures;
      out->mean_pck1 = r.mean_pck1;
      out->mean_pck3 = r.mean_pck3;
      out->mean_pck5 = r.mean_pck5;
      out->mean_aepe = r.mean_aepe;
      out->median_pck1 = r.median_pck1;
      out->median_pck3 = r.median_pck3;
      out->median_pck5 = r.median_pck5;
      out->median_aepe = r.median_aepe;
      out->median_homography_error_px = r.median_homography_error_px;
    }
    if (per_pair_pck5) {
      for (std::size_t i = 0; i < r.pairs.size(); ++i)
        per_pair_pck5[i] = r.pairs[i].ok ? r.pairs[i].pck5
                                         : std::numeric_limits<double>::quiet_NaN();
    }
  });
}

}  // extern "C"
