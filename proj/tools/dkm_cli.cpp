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

// dkm command-line tool. Talks to the library only through the C API.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "dkm/dkm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Thrown to unwind with a status from the library.
struct Failure {
  dkm_status status;
  std::string message;
};

void check(dkm_status s) {
  if (s != DKM_OK) throw Failure{s, dkm_last_error()};
}

int exit_code(dkm_status s) {
  return s == DKM_ERR_CONFIG || s == DKM_ERR_INVALID_ARGUMENT ? kExitUsage : kExitRuntime;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

template <class T, void (*Destroy)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~Handle() {
    if (p) Destroy(p);
  }
  T** out() { return &p; }
};

using Config = Handle<dkm_config, dkm_config_destroy>;
using ImageH = Handle<dkm_image, dkm_image_destroy>;
using FeaturesH = Handle<dkm_features, dkm_features_destroy>;
using WarpH = Handle<dkm_warp, dkm_warp_destroy>;
using BasisH = Handle<dkm_basis, dkm_basis_destroy>;

const std::map<std::string, std::string>& key_help() {
  static const std::map<std::string, std::string> h{
      {"regressor", "gp | attention | nn"},
      {"embedding", "coordinate embedding: fourier | se | cossq | identity"},
      {"dim", "embedding dimension D"},
      {"ell", "embedding length scale"},
      {"tau", "exp-cos-sim kernel temperature, in [0.05, 1]"},
      {"epsilon", "exp-cos-sim kernel epsilon"},
      {"jitter", "GP diagonal jitter"},
      {"nn_metric", "nearest-neighbour metric: cosine | euclidean"},
      {"variance_neighbourhood", "odd size of the variance neighbourhood appended to GP output"},
      {"strides", "regression strides, comma separated"},
      {"refine_strides", "refinement strides in order, comma separated, or none"},
      {"refine_window", "refinement search radius in cells"},
      {"fusion_threshold", "confidence above which a finer scale replaces a coarser one"},
      {"coherence", "coherence filtering on or off"},
      {"coherence_radius", "coherence neighbourhood radius in cells"},
      {"coherence_spatial_cells", "coherence spatial length in cells"},
      {"coherence_flow_ell", "coherence flow length in normalized units"},
      {"decode_upsample", "decode grid resolution relative to the support cells"},
      {"nms_radius_cells", "mode suppression radius in decode cells"},
      {"max_modes", "modes kept per query"},
      {"temperature", "soft-argmax temperature"},
      {"softargmax_window", "soft-argmax half window in decode cells"},
      {"min_mode_ratio", "modes weaker than this fraction of the top one are dropped"},
      {"conf_a", "confidence logistic weight on the decode score"},
      {"conf_b", "confidence logistic weight on the posterior variance"},
      {"seed", "master seed"},
  };
  return h;
}

// Pipeline keys exposed as flags; values applied after any config file.
struct PipelineFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "plain 'key = value' pipeline config file")
        ->check(CLI::ExistingFile);
    for (std::size_t i = 0; i < dkm_config_key_count(); ++i) {
      const std::string key = dkm_config_key(i);
      std::string flag = key;
      for (auto& c : flag)
        if (c == '_') c = '-';
      const auto it = key_help().find(key);
      options[key] = app->add_option("--" + flag, values[key],
                                     it != key_help().end() ? it->second : "pipeline setting");
    }
  }

  Config build() const {
    Config cfg;
    check(dkm_config_create(cfg.out()));
    if (!config_file.empty()) check(dkm_config_load_file(cfg.p, config_file.c_str()));
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) check(dkm_config_set(cfg.p, key.c_str(), values.at(key).c_str()));
    check(dkm_config_validate(cfg.p));
    return cfg;
  }
};

std::string config_value(const dkm_config* cfg, const char* key) {
  std::size_t needed = 0;
  check(dkm_config_get(cfg, key, nullptr, 0, &needed));
  std::string s(needed, '\0');
  check(dkm_config_get(cfg, key, s.data(), s.size(), &needed));
  s.resize(needed - 1);
  return s;
}

bool is_feature_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Failure{DKM_ERR_IO, "cannot open '" + path + "' for reading"};
  char m[4] = {};
  f.read(m, 4);
  return f.gcount() == 4 && std::string(m, 4) == "DKFM";
}

std::vector<std::size_t> parse_sizes(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string tok = text.substr(start, end - start);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(tok, &used);
      if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw Failure{DKM_ERR_INVALID_ARGUMENT,
                    std::string("bad value '") + tok + "' in " + what};
    }
    start = end + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------

struct MatchArgs {
  std::string query, support, out, matches;
  std::size_t topk = 10000;
  PipelineFlags pipeline;
};

int cmd_match(const MatchArgs& a) {
  Config cfg = a.pipeline.build();
  const bool qf = is_feature_file(a.query), sf = is_feature_file(a.support);
  if (qf != sf)
    throw Failure{DKM_ERR_CONFIG, "query and support must both be images or both be feature files"};
  WarpH warp;
  dkm_match_summary s{};
  if (qf) {
    FeaturesH q, sp;
    check(dkm_features_load(a.query.c_str(), q.out()));
    check(dkm_features_load(a.support.c_str(), sp.out()));
    check(dkm_match_features(q.p, sp.p, cfg.p, warp.out(), &s));
  } else {
    ImageH q, sp;
    check(dkm_image_load(a.query.c_str(), q.out()));
    check(dkm_image_load(a.support.c_str(), sp.out()));
    check(dkm_match_images(q.p, sp.p, cfg.p, warp.out(), &s));
  }
  check(dkm_warp_save(warp.p, a.out.c_str()));
  if (!a.matches.empty()) check(dkm_warp_write_topk(warp.p, a.topk, a.matches.c_str()));
  std::printf("warp = %zux%zu\n", s.warp_height, s.warp_width);
  std::printf("stride = %zu\n", s.stride);
  std::printf("mean_confidence = %s\n", fmt(s.mean_confidence).c_str());
  std::printf("mean_modes = %s\n", fmt(s.mean_modes).c_str());
  std::printf("multimodal_fraction = %s\n", fmt(s.multimodal_fraction).c_str());
  std::printf("degenerate = %zu\n", s.degenerate);
  std::printf("least_squares_solves = %zu\n", s.least_squares_solves);
  std::printf("max_jitter = %s\n", fmt(s.max_jitter).c_str());
  return kExitOk;
}

struct EvalArgs {
  std::string out;
  std::vector<std::string> images;
  std::string kind = "matcher";
  dkm_benchmark_config bench{};
  PipelineFlags pipeline;
};

int cmd_eval(EvalArgs& a) {
  Config cfg = a.pipeline.build();
  if (a.kind == "matcher") a.bench.pipeline = DKM_BENCH_MATCHER;
  else if (a.kind == "oracle") a.bench.pipeline = DKM_BENCH_ORACLE;
  else if (a.kind == "identity") a.bench.pipeline = DKM_BENCH_IDENTITY;
  // One master seed drives the pipeline and the pair generator alike.
  a.bench.seed = std::stoull(config_value(cfg.p, "seed"));

  std::vector<ImageH> imgs(a.images.size());
  std::vector<const dkm_image*> ptrs;
  for (std::size_t i = 0; i < a.images.size(); ++i) {
    check(dkm_image_load(a.images[i].c_str(), imgs[i].out()));
    ptrs.push_back(imgs[i].p);
  }
  dkm_benchmark_summary s{};
  check(dkm_benchmark_run(&a.bench, cfg.p, ptrs.data(), ptrs.size(), a.out.c_str(), &s, nullptr));
  std::printf("pairs = %zu\n", s.pairs);
  std::printf("failures = %zu\n", s.failures);
  std::printf("mean_pck1 = %s\n", fmt(s.mean_pck1).c_str());
  std::printf("mean_pck3 = %s\n", fmt(s.mean_pck3).c_str());
  std::printf("mean_pck5 = %s\n", fmt(s.mean_pck5).c_str());
  std::printf("mean_aepe = %s\n", fmt(s.mean_aepe).c_str());
  std::printf("median_pck1 = %s\n", fmt(s.median_pck1).c_str());
  std::printf("median_pck3 = %s\n", fmt(s.median_pck3).c_str());
  std::printf("median_pck5 = %s\n", fmt(s.median_pck5).c_str());
  std::printf("median_aepe = %s\n", fmt(s.median_aepe).c_str());
  std::printf("median_homography_error_px = %s\n", fmt(s.median_homography_error_px).c_str());
  return kExitOk;
}

struct ToyArgs {
  std::string out;
  dkm_toy_config cfg{};
};

int cmd_toy(const ToyArgs& a) {
  dkm_toy_stats s{};
  check(dkm_toy_run(&a.cfg, a.out.c_str(), &s));
  std::printf("gp_transition_width = %s\n", fmt(s.gp_transition_width).c_str());
  std::printf("attention_transition_width = %s\n", fmt(s.attention_transition_width).c_str());
  std::printf("gp_rmse = %s\n", fmt(s.gp_rmse).c_str());
  std::printf("attention_rmse = %s\n", fmt(s.attention_rmse).c_str());
  std::printf("nn_rmse = %s\n", fmt(s.nn_rmse).c_str());
  return kExitOk;
}

struct EmbedArgs {
  std::string basis = "fourier";
  std::string dims = "256,1024,4096,16384";
  double ell = 1.0;
  std::size_t pairs = 100;
  std::size_t seeds = 20;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_embed_bench(const EmbedArgs& a) {
  const auto dims = parse_sizes(a.dims, "--D");
  std::string csv = "D,mean_abs_deviation,std_over_seeds\n";
  for (std::size_t d : dims) {
    std::vector<double> dev(a.seeds);
    for (std::size_t s = 0; s < a.seeds; ++s) {
      const std::string tag = std::to_string(s);
      BasisH b;
      check(dkm_basis_sample(a.basis.c_str(), d, a.ell,
                             dkm_substream_seed(a.seed, ("basis:" + tag).c_str()), b.out()));
      check(dkm_basis_limit_deviation(b.p, a.pairs,
                                      dkm_substream_seed(a.seed, ("pairs:" + tag).c_str()),
                                      &dev[s]));
    }
    double mean = 0.0, var = 0.0;
    for (double v : dev) mean += v;
    mean /= static_cast<double>(dev.size());
    for (double v : dev) var += (v - mean) * (v - mean);
    const double sd = dev.size() > 1 ? std::sqrt(var / static_cast<double>(dev.size() - 1)) : 0.0;
    csv += std::to_string(d) + ',' + fmt(mean) + ',' + fmt(sd) + '\n';
  }
  std::fputs(csv.c_str(), stdout);
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw Failure{DKM_ERR_IO, "cannot open '" + a.out + "' for writing"};
    f << csv;
  }
  return kExitOk;
}

struct MetricsArgs {
  std::string pred, ref, support_px, csv;
  std::string thresholds = "1,2,3,4,5,8,10,16,20,32";
};

int cmd_metrics(const MetricsArgs& a) {
  WarpH pred, ref;
  check(dkm_warp_load(a.pred.c_str(), pred.out()));
  check(dkm_warp_load(a.ref.c_str(), ref.out()));
  std::size_t sh = 0, sw = 0;
  if (a.support_px.empty()) {
    check(dkm_warp_shape(ref.p, &sh, &sw));
  } else {
    const auto x = a.support_px.find('x');
    if (x == std::string::npos)
      throw Failure{DKM_ERR_INVALID_ARGUMENT, "bad value '" + a.support_px + "' for --support-px"};
    const auto h = parse_sizes(a.support_px.substr(0, x), "--support-px");
    const auto w = parse_sizes(a.support_px.substr(x + 1), "--support-px");
    sh = h.at(0);
    sw = w.at(0);
  }
  std::vector<double> th;
  {
    std::size_t start = 0;
    while (start <= a.thresholds.size()) {
      const std::size_t end = std::min(a.thresholds.find(',', start), a.thresholds.size());
      const std::string tok = a.thresholds.substr(start, end - start);
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size() || !(v > 0.0)) throw std::invalid_argument(tok);
        th.push_back(v);
      } catch (const std::exception&) {
        throw Failure{DKM_ERR_INVALID_ARGUMENT, "bad value '" + tok + "' in --thresholds"};
      }
      start = end + 1;
    }
  }
  std::vector<double> prec(th.size());
  dkm_metrics m{};
  check(dkm_metrics_compute(pred.p, ref.p, sh, sw, th.data(), th.size(), &m, prec.data()));
  std::printf("valid = %zu\n", m.valid);
  std::printf("PCK@1 = %s\n", fmt(m.pck1).c_str());
  std::printf("PCK@3 = %s\n", fmt(m.pck3).c_str());
  std::printf("PCK@5 = %s\n", fmt(m.pck5).c_str());
  std::printf("AEPE = %s\n", fmt(m.aepe).c_str());
  std::printf("AUC@5 = %s\n", fmt(m.auc5).c_str());
  std::printf("AUC@10 = %s\n", fmt(m.auc10).c_str());
  std::printf("AUC@20 = %s\n", fmt(m.auc20).c_str());
  if (!a.csv.empty()) {
    std::ofstream f(a.csv, std::ios::binary);
    if (!f) throw Failure{DKM_ERR_IO, "cannot open '" + a.csv + "' for writing"};
    f << "threshold_px,precision\n";
    for (std::size_t i = 0; i < th.size(); ++i) f << fmt(th[i]) << ',' << fmt(prec[i]) << '\n';
  }
  return kExitOk;
}

struct ExportArgs {
  std::vector<std::string> images;
  std::string out;
  std::string strides = "16,32";
};

int cmd_features_export(const ExportArgs& a) {
  const auto strides = parse_sizes(a.strides, "--strides");
  std::error_code ec;
  std::filesystem::create_directories(a.out, ec);
  if (ec) throw Failure{DKM_ERR_IO, "cannot create directory '" + a.out + "'"};
  for (const auto& path : a.images) {
    ImageH img;
    check(dkm_image_load(path.c_str(), img.out()));
    const std::string stem = std::filesystem::path(path).stem().string();
    for (std::size_t s : strides) {
      FeaturesH fm;
      check(dkm_features_extract(img.p, s, fm.out()));
      const auto dst = std::filesystem::path(a.out) / (stem + "_s" + std::to_string(s) + ".dkfm");
      check(dkm_features_save(fm.p, dst.string().c_str()));
      std::printf("%s\n", dst.string().c_str());
    }
  }
  return kExitOk;
}

int cmd_features_inspect(const std::string& path) {
  FeaturesH fm;
  check(dkm_features_load(path.c_str(), fm.out()));
  dkm_feature_info i{};
  check(dkm_features_info(fm.p, &i));
  std::printf("height = %zu\nwidth = %zu\nchannels = %zu\nstride = %zu\nnormalized = %d\n",
              i.height, i.width, i.channels, i.stride, i.normalized);
  std::printf("zero_cells = %zu\nmin_norm = %s\nmax_norm = %s\n", i.zero_cells,
              fmt(i.min_norm).c_str(), fmt(i.max_norm).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dkm: dense matching as Gaussian-process regression onto embedded coordinates"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(dkm_version()));
  int threads = 1;
  if (const char* env = std::getenv("DKM_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) {
      std::fprintf(stderr, "dkm: error: bad value '%s' in DKM_THREADS\n", env);
      return kExitUsage;
    }
    threads = static_cast<int>(v);
  }
  app.add_option("--threads", threads, "worker threads (default from DKM_THREADS, else 1)")
      ->check(CLI::Range(1, 1024));
  app.footer(
      "Exit status: 0 success, 1 runtime or numerical failure, 2 usage or configuration error.\n"
      "Files: DKWF warp fields, DKFM feature maps, PGM/PPM images. Match lists hold one\n"
      "'qx qy sx sy conf' line per match in normalized coordinates. The metrics CSV has\n"
      "columns threshold_px,precision; eval writes pairs.csv and summary.txt.");

  MatchArgs ma;
  auto* match = app.add_subcommand("match", "dense warp from query to support (images or DKFM pair)");
  match->add_option("query", ma.query, "query image or feature file")->required()->check(CLI::ExistingFile);
  match->add_option("support", ma.support, "support image or feature file")->required()->check(CLI::ExistingFile);
  match->add_option("-o,--out", ma.out, "output DKWF warp file")->required();
  match->add_option("--matches", ma.matches, "also write the top-k sparse match list here");
  match->add_option("--topk", ma.topk, "matches kept for --matches")->capture_default_str();
  ma.pipeline.attach(match);

  EvalArgs ea;
  dkm_benchmark_defaults(&ea.bench);
  auto* eval = app.add_subcommand("eval", "synthetic homography benchmark");
  eval->add_option("--out", ea.out, "output directory for pairs.csv and summary.txt")->required();
  eval->add_option("--images", ea.images, "source images (procedural textures when omitted)")
      ->check(CLI::ExistingFile);
  eval->add_option("--pairs", ea.bench.pairs, "number of pairs")->capture_default_str()->check(CLI::PositiveNumber);
  eval->add_option("--size", ea.bench.image_size, "procedural texture size in pixels")->capture_default_str();
  eval->add_option("--bench-pipeline", ea.kind, "matcher | oracle | identity")
      ->capture_default_str()
      ->check(CLI::IsMember({"matcher", "oracle", "identity"}));
  eval->add_option("--max-rotation", ea.bench.max_rotation_deg, "max rotation, degrees")->capture_default_str();
  eval->add_option("--min-scale", ea.bench.min_scale, "min scale")->capture_default_str();
  eval->add_option("--max-scale", ea.bench.max_scale, "max scale")->capture_default_str();
  eval->add_option("--max-translation", ea.bench.max_translation, "max translation, normalized")->capture_default_str();
  eval->add_option("--max-perspective", ea.bench.max_perspective, "max perspective coefficient")->capture_default_str();
  eval->add_option("--noise-std", ea.bench.noise_std, "photometric noise std")->capture_default_str();
  eval->add_option("--topk", ea.bench.topk, "matches passed to RANSAC")->capture_default_str();
  eval->add_option("--ransac-iters", ea.bench.ransac_iterations, "RANSAC iterations")->capture_default_str();
  eval->add_option("--ransac-thresh", ea.bench.ransac_thresh_px, "RANSAC inlier threshold, pixels")->capture_default_str();
  ea.pipeline.attach(eval);

  ToyArgs ta;
  dkm_toy_defaults(&ta.cfg);
  auto* toy = app.add_subcommand("toy", "1-D two-branch regression example");
  toy->add_option("--out", ta.out, "CSV path (x,gp_mean,gp_var,attn,nn,support)")->required();
  toy->add_option("--seed", ta.cfg.seed, "sample seed")->capture_default_str();
  toy->add_option("--n", ta.cfg.n, "sample count")->capture_default_str()->check(CLI::PositiveNumber);
  toy->add_option("--ell", ta.cfg.kernel_length, "squared-exponential length")->capture_default_str();
  toy->add_option("--jitter", ta.cfg.jitter, "GP observation jitter")->capture_default_str();
  toy->add_option("--noise-variance", ta.cfg.noise_variance, "branch noise variance")->capture_default_str();
  toy->add_option("--weight-first", ta.cfg.weight_first, "mixture weight of the y = x branch")
      ->capture_default_str()
      ->each([&](const std::string&) { ta.cfg.weight_second = 1.0 - ta.cfg.weight_first; });

  EmbedArgs eb;
  auto* embed = app.add_subcommand("embed-bench", "deviation of embedding kernels from their Gaussian limit");
  embed->add_option("--basis", eb.basis, "fourier | se | cossq")->capture_default_str()
      ->check(CLI::IsMember({"fourier", "se", "cossq"}));
  embed->add_option("--D", eb.dims, "comma separated dimensions")->capture_default_str();
  embed->add_option("--ell", eb.ell, "length scale")->capture_default_str();
  embed->add_option("--pairs", eb.pairs, "random point pairs per basis")->capture_default_str()->check(CLI::PositiveNumber);
  embed->add_option("--seeds", eb.seeds, "bases per dimension")->capture_default_str()->check(CLI::PositiveNumber);
  embed->add_option("--seed", eb.seed, "master seed")->capture_default_str();
  embed->add_option("--out", eb.out, "CSV path (D,mean_abs_deviation,std_over_seeds)");

  MetricsArgs mt;
  auto* metrics = app.add_subcommand("metrics", "PCK, AEPE and AUC of a predicted warp against a reference");
  metrics->add_option("pred", mt.pred, "predicted DKWF")->required()->check(CLI::ExistingFile);
  metrics->add_option("ref", mt.ref, "reference DKWF")->required()->check(CLI::ExistingFile);
  metrics->add_option("--support-px", mt.support_px, "support image size HxW in pixels (default: reference grid)");
  metrics->add_option("--thresholds", mt.thresholds, "pixel thresholds for the precision CSV")->capture_default_str();
  metrics->add_option("--csv", mt.csv, "per-threshold precision CSV");

  auto* features = app.add_subcommand("features", "feature-map tools");
  features->require_subcommand(1);
  features->fallthrough();
  ExportArgs xa;
  auto* fexport = features->add_subcommand("export", "write dense descriptors as DKFM files");
  fexport->add_option("images", xa.images, "input images")->required()->check(CLI::ExistingFile);
  fexport->add_option("--out", xa.out, "output directory")->required();
  fexport->add_option("--strides", xa.strides, "comma separated strides")->capture_default_str();
  std::string inspect_path;
  auto* finspect = features->add_subcommand("inspect", "print a DKFM header and norm statistics");
  finspect->add_option("file", inspect_path, "DKFM file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    check(dkm_set_threads(threads));
    if (*match) return cmd_match(ma);
    if (*eval) return cmd_eval(ea);
    if (*toy) return cmd_toy(ta);
    if (*embed) return cmd_embed_bench(eb);
    if (*metrics) return cmd_metrics(mt);
    if (*fexport) return cmd_features_export(xa);
    if (*finspect) return cmd_features_inspect(inspect_path);
  } catch (const Failure& f) {
    std::fprintf(stderr, "dkm: error: %s\n", f.message.c_str());
    return exit_code(f.status);
  }
  return kExitUsage;
}
