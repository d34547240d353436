#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "shotrf/frameio.hpp"
#include "shotrf/stats.hpp"

namespace shotrf {

inline constexpr int kGlcmLevels = 16;
inline constexpr std::array<int, 3> kGlcmDistances{1, 3, 5};
inline constexpr int kNccBlock = 16;

/// Symmetric gray-level co-occurrence probabilities, levels x levels.
struct GlcmMatrix {
  int levels = 0;
  std::vector<double> probs;  // row-major

  double at(int i, int j) const { return probs[static_cast<std::size_t>(i) * levels + j]; }
};

/// Co-occurrences at offsets (+d, 0) and (0, +d), both orders counted.
/// Pixel v maps to level floor(v * levels / 256).
GlcmMatrix glcm(const Plane& plane, int distance, int levels = kGlcmLevels);

struct HaralickFeatures {
  double energy = 0;
  double entropy = 0;  // bits
  double homogeneity = 0;
  double correlation = 0;  // 1 when either marginal is degenerate
  double contrast = 0;

  static constexpr std::array<const char*, 5> kNames{"energy", "entropy", "homogeneity", "correlation", "contrast"};
  std::array<double, 5> as_array() const { return {energy, entropy, homogeneity, correlation, contrast}; }
};

HaralickFeatures glcm_features(const GlcmMatrix& m);

/// Per-tile zero-mean normalized cross-correlation between co-located tiles.
struct NccMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> coeffs;  // row-major, each in [-1, 1]
};

/// Non-overlapping block x block tiles; partial edge tiles are dropped.
/// Both tiles flat gives 1, exactly one flat gives 0.
NccMatrix ncc_matrix(const Plane& a, const Plane& b, int block = kNccBlock);

inline constexpr std::size_t kSpatialTemporalDim = 40;

/// 40 values in this order:
///   for d in {1,3,5}, for f in (energy, entropy, homogeneity, correlation, contrast): (mean, std) over frames
///   for s in (mean, std, skew, kurtosis, entropy) of each NCC matrix: (mean, std) over neighbor pairs
std::vector<double> spatial_temporal_vector(const FrameSequence& frames);

std::vector<std::string> spatial_temporal_names();

}  // namespace shotrf
