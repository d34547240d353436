#pragma once

// Independent reference implementations used to check the library. They
// favor the most literal reading of each definition over speed.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <vector>

#include "shotrf/frameio.hpp"

namespace testutil {

using Big = boost::multiprecision::cpp_bin_float_50;

/// Co-occurrence probabilities from every pixel's four neighbours at
/// (+-d, 0) and (0, +-d); each unordered pair is visited from both ends.
inline std::vector<long double> glcm_reference(const shotrf::Plane& p, int d, int levels) {
  std::vector<long double> counts(static_cast<std::size_t>(levels * levels), 0.0L);
  long double total = 0;
  const int offsets[4][2] = {{d, 0}, {-d, 0}, {0, d}, {0, -d}};
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) {
      const int a = static_cast<int>(std::floor(p.at(x, y) * static_cast<double>(levels) / 256.0));
      for (const auto& o : offsets) {
        const int nx = x + o[0];
        const int ny = y + o[1];
        if (nx < 0 || ny < 0 || nx >= p.width() || ny >= p.height()) continue;
        const int b = static_cast<int>(std::floor(p.at(nx, ny) * static_cast<double>(levels) / 256.0));
        counts[static_cast<std::size_t>(a * levels + b)] += 1;
        total += 1;
      }
    }
  }
  for (auto& c : counts) c /= total;
  return counts;
}

struct HaralickReference {
  long double energy = 0, entropy = 0, homogeneity = 0, correlation = 0, contrast = 0;
};

/// Textbook formulas with separate row and column marginals.
inline HaralickReference haralick_reference(const std::vector<long double>& p, int g) {
  HaralickReference r;
  long double mu_i = 0, mu_j = 0;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const long double v = p[static_cast<std::size_t>(i * g + j)];
      mu_i += i * v;
      mu_j += j * v;
    }
  }
  long double var_i = 0, var_j = 0, cov = 0;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const long double v = p[static_cast<std::size_t>(i * g + j)];
      r.energy += v * v;
      if (v > 0) r.entropy -= v * std::log2(v);
      r.homogeneity += v / (1.0L + std::abs(i - j));
      r.contrast += static_cast<long double>((i - j) * (i - j)) * v;
      var_i += (i - mu_i) * (i - mu_i) * v;
      var_j += (j - mu_j) * (j - mu_j) * v;
      cov += (i - mu_i) * (j - mu_j) * v;
    }
  }
  const long double denom = std::sqrt(var_i) * std::sqrt(var_j);
  r.correlation = denom > 0 ? cov / denom : 1.0L;
  if (r.correlation > 1) r.correlation = 1;
  if (r.correlation < -1) r.correlation = -1;
  return r;
}

struct MomentsReference {
  double mean = 0, std = 0, skew = 0, kurtosis = 0, entropy = 0;
};

/// 50-digit moments and a histogram whose bin edges are placed in the same
/// extended precision.
inline MomentsReference moments_reference(const std::vector<double>& xs, int bins) {
  const auto n = static_cast<long>(xs.size());
  Big sum = 0;
  Big lo = xs[0], hi = xs[0];
  for (double x : xs) {
    sum += x;
    if (Big(x) < lo) lo = x;
    if (Big(x) > hi) hi = x;
  }
  MomentsReference r;
  const Big mean = sum / n;
  r.mean = static_cast<double>(mean);
  if (lo == hi) return r;
  Big m2 = 0, m3 = 0, m4 = 0;
  for (double x : xs) {
    const Big d = Big(x) - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const Big sd = boost::multiprecision::sqrt(m2);
  r.std = static_cast<double>(sd);
  r.skew = static_cast<double>(m3 / (m2 * sd));
  r.kurtosis = static_cast<double>(m4 / (m2 * m2) - 3);
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  for (double x : xs) {
    long b = static_cast<long>(boost::multiprecision::floor((Big(x) - lo) / (hi - lo) * bins));
    if (b >= bins) b = bins - 1;
    ++counts[static_cast<std::size_t>(b)];
  }
  Big h = 0;
  for (long c : counts) {
    if (c == 0) continue;
    const Big p = Big(c) / n;
    h -= p * boost::multiprecision::log(p) / boost::multiprecision::log(Big(2));
  }
  r.entropy = static_cast<double>(h);
  return r;
}

}  // namespace testutil
