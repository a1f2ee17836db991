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

#include "dkm/pipeline.hpp"

#include <algorithm>

#include "dkm/error.hpp"

namespace dkm {

const FeatureMap& FeaturePyramid::at(std::size_t stride) {
  auto it = maps_.find(stride);
  if (it == maps_.end())
    it = maps_.emplace(stride, extract_dense_descriptors(*image_, stride, params_)).first;
  return it->second;
}

EmbeddingBasis pipeline_basis(const PipelineConfig& cfg) {
  if (cfg.embedding == BasisKind::Identity) return identity_basis();
  return sample_basis(cfg.embedding, cfg.dimension, cfg.ell, substream_seed(cfg.seed, "basis"));
}

namespace {

void add_decode_stats(const DecodeResult& d, MatchSummary& s) {
  double modes = 0.0;
  std::size_t multi = 0;
  for (const auto& m : d.modes.modes) {
    modes += static_cast<double>(m.size());
    if (m.size() > 1) ++multi;
  }
  const double n = std::max<double>(1.0, static_cast<double>(d.modes.modes.size()));
  s.mean_modes = modes / n;
  s.multimodal_fraction = static_cast<double>(multi) / n;
  s.degenerate += static_cast<std::size_t>(std::count(d.degenerate.begin(), d.degenerate.end(), 1));
}

WarpField fuse(const WarpField& coarse, const WarpField& fine, double threshold) {
  const WarpField up = resample_warp(coarse, fine.shape);
  WarpField out = fine;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (fine.confidence[i] < threshold) {
      out.flow[i] = up.flow[i];
      out.confidence[i] = up.confidence[i];
    }
  }
  return out;
}

WarpField apply_coherence(const WarpField& w, const PipelineConfig& cfg) {
  if (!cfg.coherence) return w;
  const double cell = 2.0 / static_cast<double>(std::max(w.shape.width, w.shape.height));
  return coherence_filter(w, cfg.coherence_radius, cfg.coherence_spatial_cells * cell,
                          cfg.coherence_flow_ell);
}

}  // namespace

WarpField regress_and_decode(const FeatureMap& query, const FeatureMap& support,
                             const EmbeddingBasis& basis, const PipelineConfig& cfg,
                             MatchSummary* summary) {
  if (query.channels != support.channels)
    throw ConfigError("feature maps have different channel counts (" +
                      std::to_string(query.channels) + " vs " + std::to_string(support.channels) +
                      ")");
  const NormalizedGrid support_grid = make_grid(support.height, support.width);
  SupportSet set;
  set.features = support.values;
  set.targets = embed(basis, support_grid.coords).values;
  set.shape = support.shape();

  RegressorOutput pred;
  std::vector<double> variance;
  switch (cfg.regressor) {
    case RegressorKind::GP: {
      const KernelSpec spec = KernelSpec::exp_cos_sim(cfg.tau, cfg.epsilon);
      const GPPosterior post = gp_posterior(set, query.values, spec, cfg.jitter, query.shape());
      if (summary) {
        summary->least_squares_solves += post.least_squares ? 1 : 0;
        summary->max_jitter = std::max(summary->max_jitter, post.jitter);
      }
      pred = attach_variance_neighbourhood(post, cfg.variance_neighbourhood);
      variance.assign(post.variance.data(), post.variance.data() + post.variance.size());
      break;
    }
    case RegressorKind::Attention:
      pred = kernel_smoother(set, query.values, KernelSpec::exp_cos_sim(cfg.tau, cfg.epsilon),
                             query.shape());
      break;
    case RegressorKind::NearestNeighbour:
      pred = nearest_neighbour(set, query.values, cfg.nn_metric, query.shape());
      break;
  }

  const NormalizedGrid decode_grid =
      make_grid(support.height * cfg.decode_upsample, support.width * cfg.decode_upsample);
  DecodeParams dp;
  dp.nms_radius = cfg.nms_radius_cells * decode_grid.spacing().maxCoeff();
  dp.max_modes = cfg.max_modes;
  dp.temperature = cfg.temperature;
  dp.window = cfg.softargmax_window;
  dp.min_mode_ratio = cfg.min_mode_ratio;
  DecodeResult decoded = channel_decode(pred, basis, decode_grid, dp);
  if (summary) add_decode_stats(decoded, *summary);

  const std::vector<double> conf =
      confidence_estimate(variance, decoded.scores, {cfg.conf_a, cfg.conf_b});
  for (std::size_t i = 0; i < conf.size(); ++i)
    decoded.warp.confidence[i] = decoded.degenerate[i] ? 0.0 : conf[i];
  return decoded.warp;
}

MatchResult match_images(const Image& query, const Image& support, const PipelineConfig& cfg) {
  cfg.validate();
  const EmbeddingBasis basis = pipeline_basis(cfg);
  FeaturePyramid qp(query), sp(support);

  std::vector<std::size_t> strides = cfg.strides;
  std::sort(strides.begin(), strides.end(), std::greater<>());
  MatchResult result;
  result.query_pixels = {query.height, query.width};
  result.support_pixels = {support.height, support.width};

  WarpField warp;
  for (std::size_t s : strides) {
    WarpField w = regress_and_decode(qp.at(s), sp.at(s), basis, cfg, &result.summary);
    warp = warp.size() == 0 ? std::move(w) : fuse(warp, w, cfg.fusion_threshold);
    result.stride = s;
  }
  warp = apply_coherence(warp, cfg);

  for (std::size_t s : cfg.refine_strides) {
    const FeatureMap& qf = qp.at(s);
    const FeatureMap& sf = sp.at(s);
    warp = resample_warp(warp, qf.shape());
    warp = refine_subpixel(warp, qf, sf, cfg.refine_window);
    warp = apply_coherence(warp, cfg);
    result.stride = s;
  }

  double conf = 0.0;
  for (double c : warp.confidence) conf += c;
  result.summary.mean_confidence = warp.size() ? conf / static_cast<double>(warp.size()) : 0.0;
  result.warp = std::move(warp);
  return result;
}

MatchResult match_features(const FeatureMap& query, const FeatureMap& support,
                           const PipelineConfig& cfg) {
  cfg.validate();
  if (query.channels != support.channels)
    throw ConfigError("feature maps have different channel counts (" +
                      std::to_string(query.channels) + " vs " + std::to_string(support.channels) +
                      ")");
  if (query.stride != support.stride)
    throw ConfigError("feature maps have different strides (" + std::to_string(query.stride) +
                      " vs " + std::to_string(support.stride) + ")");
  const EmbeddingBasis basis = pipeline_basis(cfg);
  MatchResult result;
  result.stride = query.stride;
  result.query_pixels = {query.height * query.stride, query.width * query.stride};
  result.support_pixels = {support.height * support.stride, support.width * support.stride};
  WarpField warp = regress_and_decode(query, support, basis, cfg, &result.summary);
  warp = apply_coherence(warp, cfg);
  if (std::find(cfg.refine_strides.begin(), cfg.refine_strides.end(), query.stride) !=
      cfg.refine_strides.end()) {
    warp = refine_subpixel(warp, query, support, cfg.refine_window);
    warp = apply_coherence(warp, cfg);
  }
  double conf = 0.0;
  for (double c : warp.confidence) conf += c;
  result.summary.mean_confidence = warp.size() ? conf / static_cast<double>(warp.size()) : 0.0;
  result.warp = std::move(warp);
  return result;
}

}  // namespace dkm
