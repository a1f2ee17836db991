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

#include "dkm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dkm/error.hpp"

namespace dkm {

const char* to_string(RegressorKind kind) {
  switch (kind) {
    case RegressorKind::GP: return "gp";
    case RegressorKind::Attention: return "attention";
    case RegressorKind::NearestNeighbour: return "nn";
  }
  return "unknown";
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("bad value '" + v + "' for " + key + ": expected a number");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("bad value '" + v + "' for " + key + ": expected a non-negative integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("bad value '" + v + "' for " + key + ": expected true/false");
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  if (v == "none" || v.empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    const std::uint64_t n = parse_u64(key, t);
    if (n == 0) throw ConfigError("bad value '" + v + "' for " + key + ": strides must be >= 1");
    out.push_back(static_cast<std::size_t>(n));
  }
  return out;
}

std::string join(const std::vector<std::size_t>& v) {
  if (v.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const std::vector<std::string>& PipelineConfig::keys() {
  static const std::vector<std::string> k{
      "regressor", "embedding", "dim", "ell", "tau", "epsilon", "jitter", "nn_metric",
      "variance_neighbourhood", "strides", "refine_strides", "refine_window",
      "fusion_threshold", "coherence", "coherence_radius", "coherence_spatial_cells",
      "coherence_flow_ell", "decode_upsample", "nms_radius_cells", "max_modes", "temperature",
      "softargmax_window", "min_mode_ratio", "conf_a", "conf_b", "seed"};
  return k;
}

void PipelineConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string v = trim(raw_value);
  if (key == "regressor") {
    if (v == "gp") regressor = RegressorKind::GP;
    else if (v == "attention") regressor = RegressorKind::Attention;
    else if (v == "nn") regressor = RegressorKind::NearestNeighbour;
    else throw ConfigError("bad value '" + v + "' for regressor: expected gp|attention|nn");
  } else if (key == "embedding") {
    try {
      embedding = parse_basis_kind(v);
    } catch (const InvalidArgument&) {
      throw ConfigError("bad value '" + v + "' for embedding: expected fourier|se|cossq|identity");
    }
  } else if (key == "dim") {
    dimension = parse_u64(key, v);
  } else if (key == "ell") {
    ell = parse_double(key, v);
  } else if (key == "tau") {
    tau = parse_double(key, v);
  } else if (key == "epsilon") {
    epsilon = parse_double(key, v);
  } else if (key == "jitter") {
    jitter = parse_double(key, v);
  } else if (key == "nn_metric") {
    if (v == "cosine") nn_metric = NeighbourMetric::Cosine;
    else if (v == "euclidean") nn_metric = NeighbourMetric::Euclidean;
    else throw ConfigError("bad value '" + v + "' for nn_metric: expected cosine|euclidean");
  } else if (key == "variance_neighbourhood") {
    variance_neighbourhood = parse_u64(key, v);
  } else if (key == "strides") {
    strides = parse_list(key, v);
  } else if (key == "refine_strides") {
    refine_strides = parse_list(key, v);
  } else if (key == "refine_window") {
    refine_window = parse_u64(key, v);
  } else if (key == "fusion_threshold") {
    fusion_threshold = parse_double(key, v);
  } else if (key == "coherence") {
    coherence = parse_bool(key, v);
  } else if (key == "coherence_radius") {
    coherence_radius = parse_u64(key, v);
  } else if (key == "coherence_spatial_cells") {
    coherence_spatial_cells = parse_double(key, v);
  } else if (key == "coherence_flow_ell") {
    coherence_flow_ell = parse_double(key, v);
  } else if (key == "decode_upsample") {
    decode_upsample = parse_u64(key, v);
  } else if (key == "nms_radius_cells") {
    nms_radius_cells = parse_double(key, v);
  } else if (key == "max_modes") {
    max_modes = parse_u64(key, v);
  } else if (key == "temperature") {
    temperature = parse_double(key, v);
  } else if (key == "softargmax_window") {
    softargmax_window = parse_u64(key, v);
  } else if (key == "min_mode_ratio") {
    min_mode_ratio = parse_double(key, v);
  } else if (key == "conf_a") {
    conf_a = parse_double(key, v);
  } else if (key == "conf_b") {
    conf_b = parse_double(key, v);
  } else if (key == "seed") {
    seed = parse_u64(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void PipelineConfig::apply_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" +
                        trim(line) + "'");
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void PipelineConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_text(ss.str(), path);
}

std::string PipelineConfig::to_text() const {
  std::ostringstream os;
  os << "regressor = " << to_string(regressor) << "\n"
     << "embedding = " << to_string(embedding) << "\n"
     << "dim = " << dimension << "\n"
     << "ell = " << fmt(ell) << "\n"
     << "tau = " << fmt(tau) << "\n"
     << "epsilon = " << fmt(epsilon) << "\n"
     << "jitter = " << fmt(jitter) << "\n"
     << "nn_metric = " << (nn_metric == NeighbourMetric::Cosine ? "cosine" : "euclidean") << "\n"
     << "variance_neighbourhood = " << variance_neighbourhood << "\n"
     << "strides = " << join(strides) << "\n"
     << "refine_strides = " << join(refine_strides) << "\n"
     << "refine_window = " << refine_window << "\n"
     << "fusion_threshold = " << fmt(fusion_threshold) << "\n"
     << "coherence = " << (coherence ? "true" : "false") << "\n"
     << "coherence_radius = " << coherence_radius << "\n"
     << "coherence_spatial_cells = " << fmt(coherence_spatial_cells) << "\n"
     << "coherence_flow_ell = " << fmt(coherence_flow_ell) << "\n"
     << "decode_upsample = " << decode_upsample << "\n"
     << "nms_radius_cells = " << fmt(nms_radius_cells) << "\n"
     << "max_modes = " << max_modes << "\n"
     << "temperature = " << fmt(temperature) << "\n"
     << "softargmax_window = " << softargmax_window << "\n"
     << "min_mode_ratio = " << fmt(min_mode_ratio) << "\n"
     << "conf_a = " << fmt(conf_a) << "\n"
     << "conf_b = " << fmt(conf_b) << "\n"
     << "seed = " << seed << "\n";
  return os.str();
}

void PipelineConfig::validate() const {
  if (dimension == 0) throw ConfigError("dim must be >= 1");
  if (!(ell > 0.0)) throw ConfigError("ell must be > 0");
  if (!(tau >= 0.05 && tau <= 1.0)) throw ConfigError("tau must lie in [0.05, 1]");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(jitter >= 0.0)) throw ConfigError("jitter must be >= 0");
  if (variance_neighbourhood % 2 == 0) throw ConfigError("variance_neighbourhood must be odd");
  if (strides.empty()) throw ConfigError("strides must name at least one stride");
  if (decode_upsample == 0) throw ConfigError("decode_upsample must be >= 1");
  if (max_modes == 0) throw ConfigError("max_modes must be >= 1");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (!(coherence_spatial_cells > 0.0) || !(coherence_flow_ell > 0.0))
    throw ConfigError("coherence length scales must be > 0");
  if (!(nms_radius_cells >= 0.0)) throw ConfigError("nms_radius_cells must be >= 0");
}

std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) {
  // FNV-1a over the name, mixed with the seed through splitmix64.
  std::uint64_t h = 1469598103934665603ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace dkm
