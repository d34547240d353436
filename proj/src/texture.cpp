#include "shotrf/texture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "shotrf/error.hpp"

namespace shotrf {

GlcmMatrix glcm(const Plane& plane, int distance, int levels) {
  if (levels < 2) throw Error("glcm: levels must be at least 2");
  if (distance < 1) throw Error("glcm: distance must be positive");
  const int w = plane.width();
  const int h = plane.height();
  if (w <= distance && h <= distance) {
    throw DimensionError("glcm: plane " + std::to_string(w) + "x" + std::to_string(h) +
                         " has no pixel pairs at distance " + std::to_string(distance));
  }

  std::vector<int> q(plane.size());
  auto samples = plane.samples();
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = samples[i] * levels / 256;

  const auto g = static_cast<std::size_t>(levels);
  std::vector<std::uint64_t> counts(g * g, 0);
  for (int y = 0; y < h; ++y) {
    const int* row = q.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x + distance < w; ++x) ++counts[row[x] * g + row[x + distance]];
    if (y + distance < h) {
      const int* below = row + static_cast<std::size_t>(distance) * w;
      for (int x = 0; x < w; ++x) ++counts[row[x] * g + below[x]];
    }
  }

  GlcmMatrix m;
  m.levels = levels;
  m.probs.assign(g * g, 0.0);
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += 2 * c;
  const double inv = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      m.probs[i * g + j] = static_cast<double>(counts[i * g + j] + counts[j * g + i]) * inv;
    }
  }
  return m;
}

HaralickFeatures glcm_features(const GlcmMatrix& m) {
  const int g = m.levels;
  // Row and column marginals coincide for a symmetric matrix.
  std::vector<double> marginal(static_cast<std::size_t>(g), 0.0);
  HaralickFeatures f;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const double p = m.at(i, j);
      if (p == 0) continue;
      marginal[static_cast<std::size_t>(i)] += p;
      f.energy += p * p;
      f.entropy -= p * std::log2(p);
      f.homogeneity += p / (1.0 + std::abs(i - j));
      f.contrast += static_cast<double>((i - j) * (i - j)) * p;
    }
  }
  double mu = 0;
  for (int i = 0; i < g; ++i) mu += i * marginal[static_cast<std::size_t>(i)];
  double var = 0;
  for (int i = 0; i < g; ++i) var += (i - mu) * (i - mu) * marginal[static_cast<std::size_t>(i)];
  if (var <= 0) {
    f.correlation = 1.0;
  } else {
    double cov = 0;
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) cov += (i - mu) * (j - mu) * m.at(i, j);
    }
    f.correlation = std::clamp(cov / var, -1.0, 1.0);
  }
  return f;
}

NccMatrix ncc_matrix(const Plane& a, const Plane& b, int block) {
  if (a.width() != b.width() || a.height() != b.height()) throw DimensionError("ncc_matrix: dimension mismatch");
  if (block < 2) throw Error("ncc_matrix: block must be at least 2");
  if (a.width() < block || a.height() < block) throw DimensionError("ncc_matrix: frame smaller than block");

  NccMatrix out;
  out.rows = a.height() / block;
  out.cols = a.width() / block;
  out.coeffs.reserve(static_cast<std::size_t>(out.rows) * out.cols);
  const double n = static_cast<double>(block) * block;
  for (int ty = 0; ty < out.rows; ++ty) {
    for (int tx = 0; tx < out.cols; ++tx) {
      double sa = 0, sb = 0;
      for (int y = ty * block; y < (ty + 1) * block; ++y) {
        for (int x = tx * block; x < (tx + 1) * block; ++x) {
          sa += a.at(x, y);
          sb += b.at(x, y);
        }
      }
      const double ma = sa / n;
      const double mb = sb / n;
      double cab = 0, caa = 0, cbb = 0;
      for (int y = ty * block; y < (ty + 1) * block; ++y) {
        for (int x = tx * block; x < (tx + 1) * block; ++x) {
          const double da = a.at(x, y) - ma;
          const double db = b.at(x, y) - mb;
          cab += da * db;
          caa += da * da;
          cbb += db * db;
        }
      }
      double r;
      if (caa == 0 && cbb == 0) {
        r = 1.0;
      } else if (caa == 0 || cbb == 0) {
        r = 0.0;
      } else {
        r = std::clamp(cab / std::sqrt(caa * cbb), -1.0, 1.0);
      }
      out.coeffs.push_back(r);
    }
  }
  return out;
}

std::vector<double> spatial_temporal_vector(const FrameSequence& frames) {
  if (frames.size() < 2) throw DimensionError("spatial_temporal_vector: segment needs at least 2 frames");

  std::vector<double> out;
  out.reserve(kSpatialTemporalDim);
  std::vector<double> per_frame(frames.size());
  for (int d : kGlcmDistances) {
    std::vector<HaralickFeatures> feats;
    feats.reserve(frames.size());
    for (const auto& f : frames.frames()) feats.push_back(glcm_features(glcm(f, d)));
    for (std::size_t k = 0; k < HaralickFeatures::kNames.size(); ++k) {
      for (std::size_t i = 0; i < feats.size(); ++i) per_frame[i] = feats[i].as_array()[k];
      const StatSummary s = moments(per_frame, 1);
      out.push_back(s.mean);
      out.push_back(s.std);
    }
  }

  std::vector<StatSummary> pair_stats;
  for (std::size_t t = 1; t < frames.size(); ++t) {
    pair_stats.push_back(moments(ncc_matrix(frames[t - 1], frames[t]).coeffs, kNccHistBins));
  }
  std::vector<double> per_pair(pair_stats.size());
  for (std::size_t k = 0; k < StatSummary::kNames.size(); ++k) {
    for (std::size_t i = 0; i < pair_stats.size(); ++i) per_pair[i] = pair_stats[i].as_array()[k];
    const StatSummary s = moments(per_pair, 1);
    out.push_back(s.mean);
    out.push_back(s.std);
  }
  return out;
}

std::vector<std::string> spatial_temporal_names() {
  std::vector<std::string> names;
  for (int d : kGlcmDistances) {
    for (const char* f : HaralickFeatures::kNames) {
      names.push_back("glcm_d" + std::to_string(d) + "_" + f + "_mean");
      names.push_back("glcm_d" + std::to_string(d) + "_" + f + "_std");
    }
  }
  for (auto s : StatSummary::kNames) {
    names.push_back("ncc_" + std::string(s) + "_mean");
    names.push_back("ncc_" + std::string(s) + "_std");
  }
  return names;
}

}  // namespace shotrf
