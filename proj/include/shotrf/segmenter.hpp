#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shotrf/frameio.hpp"

namespace shotrf {

/// Half-open frame range [start_frame, end_frame) of one shot.
struct Segment {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;
  std::uint64_t source_id = 0;  // FNV-1a over the covered luma bytes

  std::size_t length() const { return end_frame - start_frame; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct ShotDetectorConfig {
  double threshold = 12.0;
  std::size_t min_shot_len = 25;
};

/// 64-bit FNV-1a over every luma byte of the frames, in order.
std::uint64_t fnv1a_luma(std::span<const Plane> frames);

std::string format_source_id(std::uint64_t id);
std::uint64_t parse_source_id(const std::string& text);

/// Luma mean-absolute-difference cut detector.
///
/// A cut is placed before frame t when MAD(f[t-1], f[t]) exceeds the threshold
/// and the running shot already holds at least min_shot_len frames. A short
/// trailing remainder is merged into the previous shot so that every segment
/// except a lone whole-video segment satisfies the minimum length.
std::vector<Segment> detect_shots(const FrameSequence& frames, const ShotDetectorConfig& cfg = {});

}  // namespace shotrf
