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

#include "dkm/decode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dkm/error.hpp"
#include "dkm/parallel.hpp"

namespace dkm {

std::vector<double> correlation_profile(const Vector& prediction, const Matrix& embedded_grid) {
  if (prediction.size() != embedded_grid.cols())
    throw InvalidArgument("correlation_profile: dimension mismatch");
  const Vector c = embedded_grid * prediction;
  return {c.data(), c.data() + c.size()};
}

namespace {

struct Candidate {
  double score;
  std::size_t index;
};

// Grid points whose score is >= every 8-neighbour and > those with a lower
// index (so plateaus yield a single candidate).
std::vector<Candidate> local_maxima(const std::vector<double>& s, GridShape g) {
  std::vector<Candidate> out;
  const long h = static_cast<long>(g.height), w = static_cast<long>(g.width);
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r * w + c);
      bool is_max = true;
      for (long dr = -1; dr <= 1 && is_max; ++dr) {
        for (long dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const long rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          const std::size_t j = static_cast<std::size_t>(rr * w + cc);
          if (s[j] > s[i] || (s[j] == s[i] && j < i)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) out.push_back({s[i], i});
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return a.score != b.score ? a.score > b.score : a.index < b.index;
  });
  return out;
}

// Unit-normalized embeddings of the decode grid extended by `pad` virtual
// cells on every side. The padding lets the soft-argmax window stay full and
// symmetric about a peak on the grid border.
struct PaddedGrid {
  Matrix unit;
  long pad = 0;
  long width = 0;  // padded width

  double score(const Vector& p, long r, long c) const {
    return unit.row((r + pad) * width + (c + pad)).dot(p);
  }
};

PaddedGrid pad_grid(const EmbeddingBasis& basis, GridShape g, std::size_t window) {
  PaddedGrid out;
  out.pad = static_cast<long>(window);
  const long h = static_cast<long>(g.height) + 2 * out.pad;
  out.width = static_cast<long>(g.width) + 2 * out.pad;
  std::vector<Vec2> coords;
  coords.reserve(static_cast<std::size_t>(h * out.width));
  for (long r = -out.pad; r < h - out.pad; ++r)
    for (long c = -out.pad; c < out.width - out.pad; ++c)
      coords.emplace_back(pixel_to_normalized(static_cast<double>(c), g.width),
                          pixel_to_normalized(static_cast<double>(r), g.height));
  out.unit = embed(basis, coords).values;
  for (Eigen::Index r = 0; r < out.unit.rows(); ++r) {
    const double n = out.unit.row(r).norm();
    if (n > 0.0) out.unit.row(r) /= n;
  }
  return out;
}

Vec2 soft_argmax(const Vector& p, const PaddedGrid& padded, const NormalizedGrid& grid,
                 std::size_t center, double temperature) {
  const long w = static_cast<long>(grid.shape.width);
  const long r0 = static_cast<long>(center) / w, c0 = static_cast<long>(center) % w;
  const double peak = padded.score(p, r0, c0);
  if (!(peak > 0.0) || temperature <= 0.0) return grid.coords[center];
  const long win = padded.pad;
  Vec2 acc = Vec2::Zero();
  double total = 0.0;
  for (long r = r0 - win; r <= r0 + win; ++r) {
    for (long c = c0 - win; c <= c0 + win; ++c) {
      const double weight = std::exp((padded.score(p, r, c) / peak - 1.0) / temperature);
      acc += weight * Vec2(pixel_to_normalized(static_cast<double>(c), grid.shape.width),
                           pixel_to_normalized(static_cast<double>(r), grid.shape.height));
      total += weight;
    }
  }
  // The discrete peak is the best lattice point, so the estimate stays in its cell.
  const Vec2 half = 0.5 * grid.spacing();
  const Vec2 c = grid.coords[center];
  return (acc / total).cwiseMax(c - half).cwiseMin(c + half);
}

}  // namespace

DecodeResult channel_decode(const RegressorOutput& pred, const EmbeddingBasis& basis,
                            const NormalizedGrid& grid, const DecodeParams& params) {
  if (static_cast<std::size_t>(pred.embedding.cols()) != basis.dimension())
    throw InvalidArgument("channel_decode: prediction has " +
                          std::to_string(pred.embedding.cols()) + " channels, basis has " +
                          std::to_string(basis.dimension()));
  if (grid.size() == 0) throw InvalidArgument("channel_decode: empty grid");
  if (params.max_modes == 0) throw InvalidArgument("channel_decode: max_modes must be >= 1");

  const auto q = static_cast<std::size_t>(pred.embedding.rows());
  const GridShape qshape =
      pred.query_shape.size() == q ? pred.query_shape : GridShape{1, q};
  DecodeResult out;
  out.warp = WarpField(qshape);
  out.modes.modes.resize(q);
  out.scores.assign(q, 0.0);
  out.degenerate.assign(q, 0);

  if (basis.kind() == BasisKind::Identity) {
    for (std::size_t i = 0; i < q; ++i) {
      const Vec2 f = pred.embedding.row(static_cast<Eigen::Index>(i)).transpose();
      out.warp.flow[i] = f;
      out.warp.confidence[i] = 1.0;
      out.scores[i] = 1.0;
      out.modes.modes[i] = {{f, 1.0}};
    }
    return out;
  }

  // Grid embeddings are unit-normalized so the profile of B(x) peaks at x even
  // where sparse bases leave uneven coverage.
  Matrix embedded = embed(basis, grid.coords).values;
  const Vector norms = embedded.rowwise().norm();
  const double self_corr = norms.mean();
  for (Eigen::Index r = 0; r < embedded.rows(); ++r)
    if (norms[r] > 0.0) embedded.row(r) /= norms[r];
  const PaddedGrid padded = pad_grid(basis, grid.shape, params.window);
  const Vec2 spacing = grid.spacing();
  const double radius = params.nms_radius.value_or(3.0 * spacing.maxCoeff());

  parallel_for(q, [&](std::size_t i) {
    const Vector p = pred.embedding.row(static_cast<Eigen::Index>(i)).transpose();
    if (p.isZero(0.0)) {
      out.degenerate[i] = 1;
      out.warp.flow[i] = pixel_center(i / qshape.width, i % qshape.width, qshape);
      out.warp.confidence[i] = 0.0;
      return;
    }
    const std::vector<double> s = correlation_profile(p, embedded);
    const std::vector<Candidate> cands = local_maxima(s, grid.shape);
    std::vector<Mode>& modes = out.modes.modes[i];
    const double top = cands.front().score;
    for (const Candidate& cand : cands) {
      if (modes.size() >= params.max_modes) break;
      if (top > 0.0 && cand.score < params.min_mode_ratio * top) break;
      const Vec2 at = soft_argmax(p, padded, grid, cand.index, params.temperature);
      const bool separated = std::all_of(modes.begin(), modes.end(), [&](const Mode& m) {
        return (m.coord - at).norm() >= radius;
      });
      if (separated) modes.push_back({at, cand.score});
    }
    out.warp.flow[i] = modes.front().coord;
    out.scores[i] = self_corr > 0.0 ? top / self_corr : 0.0;
    out.warp.confidence[i] = std::clamp(out.scores[i], 0.0, 1.0);
  });
  return out;
}

WarpField coherence_filter(const WarpField& w, std::size_t radius, double spatial_ell,
                           double flow_ell) {
  if (!(spatial_ell > 0.0) || !(flow_ell > 0.0))
    throw InvalidArgument("coherence_filter: length scales must be > 0");
  const GridShape g = w.shape;
  WarpField out = w;
  const long h = static_cast<long>(g.height), wd = static_cast<long>(g.width);
  const long rad = static_cast<long>(radius);
  const double inv_s2 = 1.0 / (spatial_ell * spatial_ell);
  const double inv_f2 = 1.0 / (flow_ell * flow_ell);
  parallel_for(g.size(), [&](std::size_t i) {
    const long r = static_cast<long>(i) / wd, c = static_cast<long>(i) % wd;
    const Vec2 pos = pixel_center(static_cast<std::size_t>(r), static_cast<std::size_t>(c), g);
    const Vec2 fi = w.flow[i];
    // Window kept symmetric about the cell so a truncated edge does not drag
    // border flow towards the interior.
    const long ry = std::min({rad, r, h - 1 - r});
    const long rx = std::min({rad, c, wd - 1 - c});
    Vec2 acc = Vec2::Zero();
    double total = 0.0;
    for (long rr = r - ry; rr <= r + ry; ++rr) {
      for (long cc = c - rx; cc <= c + rx; ++cc) {
        const std::size_t j = static_cast<std::size_t>(rr * wd + cc);
        const Vec2 dpos =
            pixel_center(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc), g) - pos;
        const double weight = w.confidence[j] * std::exp(-dpos.squaredNorm() * inv_s2) *
                              std::exp(-(w.flow[j] - fi).squaredNorm() * inv_f2);
        acc += weight * w.flow[j];
        total += weight;
      }
    }
    if (total > 0.0) out.flow[i] = acc / total;
  });
  return out;
}

std::vector<double> confidence_estimate(const std::vector<double>& variance,
                                        const std::vector<double>& scores,
                                        ConfidenceCalibration calib) {
  if (!variance.empty() && variance.size() != scores.size())
    throw InvalidArgument("confidence_estimate: field sizes differ");
  double max_score = 0.0, max_var = 0.0;
  for (double s : scores) max_score = std::max(max_score, s);
  for (double v : variance) max_var = std::max(max_var, v);
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double ns = max_score > 0.0 ? std::max(scores[i], 0.0) / max_score : 0.0;
    const double nv = !variance.empty() && max_var > 0.0 ? std::max(variance[i], 0.0) / max_var : 0.0;
    const double logit = calib.a * ns - calib.b * nv;
    out[i] = std::clamp(1.0 / (1.0 + std::exp(-logit)), 0.0, 1.0);
  }
  return out;
}

namespace {

// 3x3 least-squares quadratic a + b x + c y + d x^2 + e xy + f y^2 on the
// lattice {-1,0,1}^2; returns false when it has no interior maximum.
bool quadratic_peak(const double v[3][3], Vec2& peak) {
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const double x = i - 1, y = j - 1, f = v[j][i];
      sx += x * f;
      sy += y * f;
      sxx += x * x * f;
      syy += y * y * f;
      sxy += x * y * f;
    }
  }
  double mean = 0;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) mean += v[j][i];
  mean /= 9.0;
  // Orthogonal-design solution on the 3x3 lattice.
  const double b = sx / 6.0, c = sy / 6.0, e = sxy / 4.0;
  const double d = (sxx - 6.0 * mean) / 2.0;
  const double f = (syy - 6.0 * mean) / 2.0;
  const double h11 = 2 * d, h22 = 2 * f, h12 = e;
  const double det = h11 * h22 - h12 * h12;
  if (!(h11 < 0.0) || !(det > 0.0)) return false;
  peak.x() = -(h22 * b - h12 * c) / det;
  peak.y() = -(h11 * c - h12 * b) / det;
  return std::abs(peak.x()) <= 1.0 && std::abs(peak.y()) <= 1.0;
}

}  // namespace

WarpField refine_subpixel(const WarpField& w, const FeatureMap& query_features,
                          const FeatureMap& support_features, std::size_t window,
                          RefineStats* stats) {
  if (query_features.shape() != w.shape)
    throw InvalidArgument("refine_subpixel: warp and query feature grids differ");
  if (query_features.channels != support_features.channels)
    throw InvalidArgument("refine_subpixel: feature channel counts differ");
  if (query_features.stride != support_features.stride)
    throw InvalidArgument("refine_subpixel: feature maps have different strides");
  if (window == 0) return w;

  WarpField out = w;
  const std::size_t nc = support_features.channels;
  const Vec2 step(2.0 / static_cast<double>(support_features.width),
                  2.0 / static_cast<double>(support_features.height));
  const long win = static_cast<long>(window);
  std::vector<std::uint8_t> flat(w.size(), 0), updated(w.size(), 0), clamped(w.size(), 0);

  parallel_for(w.size(), [&](std::size_t i) {
    const auto qrow = query_features.values.row(static_cast<Eigen::Index>(i));
    const double qn = qrow.norm();
    if (qn == 0.0) {
      flat[i] = 1;
      out.confidence[i] *= 0.5;
      return;
    }
    std::vector<double> buf(nc);
    const Vec2 origin = w.flow[i];
    auto corr = [&](const Vec2& offset_cells) {
      const Vec2 at = origin + offset_cells.cwiseProduct(step);
      sample_features(support_features, at, buf.data());
      double dot = 0.0, sn = 0.0;
      for (std::size_t k = 0; k < nc; ++k) {
        dot += qrow(static_cast<Eigen::Index>(k)) * buf[k];
        sn += buf[k] * buf[k];
      }
      return sn > 0.0 ? dot / (qn * std::sqrt(sn)) : 0.0;
    };

    Vec2 best = Vec2::Zero();
    double best_val = -2.0, worst_val = 2.0;
    for (long dy = -win; dy <= win; ++dy) {
      for (long dx = -win; dx <= win; ++dx) {
        const Vec2 o(static_cast<double>(dx), static_cast<double>(dy));
        const double v = corr(o);
        worst_val = std::min(worst_val, v);
        if (v > best_val) {
          best_val = v;
          best = o;
        }
      }
    }
    if (best_val - worst_val < 1e-9) {
      flat[i] = 1;
      out.confidence[i] *= 0.5;
      return;
    }

    // Step-halving passes bound the cusp bias of the final quadratic fit.
    double h = 1.0;
    double v3[3][3];
    for (int pass = 0; pass < 4; ++pass) {
      h *= 0.5;
      Vec2 next = best;
      double next_val = best_val;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const Vec2 o = best + h * Vec2(dx, dy);
          if (std::abs(o.x()) > win || std::abs(o.y()) > win) continue;
          const double v = corr(o);
          if (v > next_val) {
            next_val = v;
            next = o;
          }
        }
      }
      best = next;
      best_val = next_val;
    }
    bool lattice_full = true;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const Vec2 o = best + h * Vec2(dx, dy);
        if (std::abs(o.x()) > win || std::abs(o.y()) > win) lattice_full = false;
        v3[dy + 1][dx + 1] = (dx == 0 && dy == 0) ? best_val : corr(o);
      }
    }
    Vec2 delta;
    Vec2 offset = best;
    if (lattice_full && quadratic_peak(v3, delta)) offset += h * delta;
    offset = offset.cwiseMax(Vec2::Constant(-static_cast<double>(win)))
                 .cwiseMin(Vec2::Constant(static_cast<double>(win)));
    const Vec2 target = origin + offset.cwiseProduct(step);
    out.flow[i] = target;
    updated[i] = offset.squaredNorm() > 0.0 ? 1 : 0;
    const double u = normalized_to_pixel(target.x(), support_features.width);
    const double v = normalized_to_pixel(target.y(), support_features.height);
    if (u < 0.0 || v < 0.0 || u > static_cast<double>(support_features.width - 1) ||
        v > static_cast<double>(support_features.height - 1)) {
      clamped[i] = 1;
      out.confidence[i] *= 0.5;
    }
  });
  if (stats) {
    stats->flat = static_cast<std::size_t>(std::count(flat.begin(), flat.end(), 1));
    stats->updated = static_cast<std::size_t>(std::count(updated.begin(), updated.end(), 1));
    stats->clamped = static_cast<std::size_t>(std::count(clamped.begin(), clamped.end(), 1));
  }
  return out;
}

std::vector<std::uint8_t> mutual_consistency_filter(const WarpField& w_qs, const WarpField& w_sq,
                                                    double threshold) {
  if (w_sq.size() == 0) throw InvalidArgument("mutual_consistency_filter: empty backward warp");
  std::vector<std::uint8_t> mask(w_qs.size(), 0);
  for (std::size_t r = 0; r < w_qs.shape.height; ++r) {
    for (std::size_t c = 0; c < w_qs.shape.width; ++c) {
      const std::size_t i = w_qs.index(r, c);
      const Vec2 start = pixel_center(r, c, w_qs.shape);
      // No backward warp exists off the support image.
      if (std::abs(w_qs.flow[i].x()) > 1.0 || std::abs(w_qs.flow[i].y()) > 1.0) continue;
      const Vec2 back = sample_flow(w_sq, w_qs.flow[i]);
      mask[i] = (back - start).norm() < threshold ? 1 : 0;
    }
  }
  return mask;
}

std::vector<Match> sparsify_topk(const WarpField& w, std::size_t k) {
  if (k == 0) throw InvalidArgument("sparsify_topk: k must be >= 1");
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return w.confidence[a] != w.confidence[b] ? w.confidence[a] > w.confidence[b]
                                                                : a < b;
                    });
  std::vector<Match> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = order[j];
    out.push_back({pixel_center(i / w.shape.width, i % w.shape.width, w.shape), w.flow[i],
                   w.confidence[i]});
  }
  return out;
}

void save_matches(const std::vector<Match>& matches, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  char line[160];
  for (const Match& m : matches) {
    std::snprintf(line, sizeof line, "%.9g %.9g %.9g %.9g %.9g\n", m.query.x(), m.query.y(),
                  m.support.x(), m.support.y(), m.confidence);
    out << line;
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<Match> load_matches(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<Match> out;
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      std::istringstream ls(line);
      Match m;
      if (!(ls >> m.query.x() >> m.query.y() >> m.support.x() >> m.support.y() >> m.confidence))
        throw FormatError("'" + path + "': malformed match line", offset);
      out.push_back(m);
    }
    offset += line.size() + 1;
  }
  return out;
}

}  // namespace dkm
