#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "shotrf/features.hpp"
#include "shotrf/frameio.hpp"
#include "shotrf/oracle.hpp"
#include "shotrf/segmenter.hpp"

namespace shotrf {

/// Opaque handle to one encoded output.
struct StreamRef {
  std::string handle;
  double rf = 0;
  friend bool operator==(const StreamRef&, const StreamRef&) = default;
};

/// Everything an encoder or quality meter may need about one segment.
struct SegmentJob {
  std::size_t index = 0;
  Segment segment;
  std::shared_ptr<const FrameSequence> frames;  // source luma, null when unavailable
  FeatureVector features;
  std::optional<SyntheticCurveParams> curve;  // explicit synthetic response, if any
  std::uint64_t seed = 0;
};

/// Pass indices: 1 and 2 for the two-pass loop, 0 for the fixed-RF baseline,
/// 1000 + k for the k-th label search probe.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual StreamRef encode(const SegmentJob& job, double rf, int pass) = 0;
};

class QualityMeter {
 public:
  virtual ~QualityMeter() = default;
  virtual double measure(const SegmentJob& job, const StreamRef& stream, int pass) = 0;
};

/// Encoder and meter backed by logistic synthetic curves. Stateless and
/// thread-safe. Jobs without an explicit curve get one from their features.
class SyntheticCodec final : public Encoder, public QualityMeter {
 public:
  explicit SyntheticCodec(double noise_sigma_for_derived_curves = 0.0) : noise_sigma_(noise_sigma_for_derived_curves) {}

  StreamRef encode(const SegmentJob& job, double rf, int pass) override;
  double measure(const SegmentJob& job, const StreamRef& stream, int pass) override;

  SyntheticCurveParams curve_for(const SegmentJob& job) const;

 private:
  double noise_sigma_;
};

}  // namespace shotrf
