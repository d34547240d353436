#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "shotrf/features.hpp"
#include "shotrf/frameio.hpp"

namespace shotrf {

/// Logistic RF -> quality response: V = c / (1 + exp(k (rf - m))) + noise.
struct SyntheticCurveParams {
  double midpoint = 30.0;  // m, RF units
  double slope = 0.25;     // k > 0
  double ceiling = 100.0;  // c in (0, 100]
  double noise_sigma = 0.0;

  void validate() const;
  friend bool operator==(const SyntheticCurveParams&, const SyntheticCurveParams&) = default;
};

/// Quality at rf, with gaussian jitter drawn from `seed`, clamped to [0, 100].
double synth_quality(const SyntheticCurveParams& p, double rf, std::uint64_t seed);

/// Exact noise-free inverse, clamped to [0, 51]. Throws when target is not in (0, c).
double synth_label(const SyntheticCurveParams& p, double target);

/// Content complexity in [0, 1]^2.
struct ComplexityDescriptor {
  double spatial = 0;
  double temporal = 0;
  friend bool operator==(const ComplexityDescriptor&, const ComplexityDescriptor&) = default;
};

/// Affine map between two anchors: zero complexity gives (m, k) = (38, 0.35),
/// full complexity gives (16, 0.18). Midpoint falls with 0.6 s + 0.4 t, slope
/// with 0.3 s + 0.7 t. Inputs are clamped to [0, 1].
SyntheticCurveParams curve_from_features(const ComplexityDescriptor& d, double noise_sigma = 0.0);

/// Descriptor of a real segment from its feature vector:
/// spatial = GLCM d=1 contrast mean / 30, temporal = 1 - mean NCC, both clamped.
ComplexityDescriptor descriptor_from_features(const FeatureVector& features);

/// splitmix64 finalizer over (a, b); used to derive per-event seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

struct RenderConfig {
  int width = 48;
  int height = 48;
  std::size_t frames = 5;
};

/// Deterministic luma clip whose texture amplitude follows `spatial` and
/// whose motion and temporal noise follow `temporal`.
FrameSequence render_synthetic_segment(const ComplexityDescriptor& d, std::uint64_t seed, const RenderConfig& cfg = {});

struct SyntheticSegment {
  std::size_t index = 0;
  ComplexityDescriptor descriptor;
  SyntheticCurveParams curve;
  std::uint64_t seed = 0;
};

/// Uniform random descriptors, curves from curve_from_features.
std::vector<SyntheticSegment> generate_corpus(std::size_t count, std::uint64_t seed, double noise_sigma);

/// Text corpus: `# shotrf synthetic-corpus v1` header, then one line per segment:
///   index spatial temporal midpoint slope ceiling noise_sigma seed
void write_corpus(std::ostream& out, const std::vector<SyntheticSegment>& corpus);
std::vector<SyntheticSegment> read_corpus(std::istream& in);
void write_corpus_file(const std::string& path, const std::vector<SyntheticSegment>& corpus);
std::vector<SyntheticSegment> read_corpus_file(const std::string& path);

}  // namespace shotrf
