#include "shotrf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "shotrf/error.hpp"

namespace shotrf {

double histogram_entropy(std::span<const double> xs, int hist_bins) {
  if (xs.empty() || hist_bins < 1) return 0.0;
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  if (!(span > 0)) return 0.0;

  std::vector<std::size_t> counts(static_cast<std::size_t>(hist_bins), 0);
  for (double x : xs) {
    auto bin = static_cast<long>(std::floor((x - lo) / span * hist_bins));
    bin = std::clamp(bin, 0L, static_cast<long>(hist_bins) - 1);
    ++counts[static_cast<std::size_t>(bin)];
  }
  const double n = static_cast<double>(xs.size());
  double h = 0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

StatSummary moments(std::span<const double> xs, int hist_bins) {
  if (xs.empty()) throw Error("moments: empty input");
  StatSummary s;
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  if (*lo_it == *hi_it) {
    s.mean = *lo_it;
    return s;
  }
  const double n = static_cast<double>(xs.size());
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / n;

  double m2 = 0, m3 = 0, m4 = 0;
  for (double x : xs) {
    const double d = x - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 0) {
    s.std = std::sqrt(m2);
    s.skew = m3 / (m2 * s.std);
    s.kurtosis = m4 / (m2 * m2) - 3.0;
  }
  s.entropy = histogram_entropy(xs, hist_bins);
  return s;
}

}  // namespace shotrf
