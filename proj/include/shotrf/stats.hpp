#pragma once

#include <array>
#include <span>
#include <string_view>

namespace shotrf {

/// Population moments plus histogram entropy of a sample.
struct StatSummary {
  double mean = 0;
  double std = 0;
  double skew = 0;      // E[z^3]
  double kurtosis = 0;  // E[z^4] - 3
  double entropy = 0;   // bits, over a [min, max] histogram

  static constexpr std::array<std::string_view, 5> kNames{"mean", "std", "skew", "kurtosis", "entropy"};
  std::array<double, 5> as_array() const { return {mean, std, skew, kurtosis, entropy}; }
};

inline constexpr int kNccHistBins = 32;
inline constexpr int kPrecodeHistBins = 16;

/// Constant input yields zero std, skew, kurtosis and entropy.
StatSummary moments(std::span<const double> xs, int hist_bins);

/// Shannon entropy (bits) of a hist_bins histogram spanning [min, max] of xs.
double histogram_entropy(std::span<const double> xs, int hist_bins);

}  // namespace shotrf
