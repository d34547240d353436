#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "shotrf/frameio.hpp"

namespace testutil {

inline shotrf::Plane random_plane(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> px(0, 255);
  shotrf::Plane p(w, h);
  for (auto& v : p.samples()) v = static_cast<std::uint8_t>(px(rng));
  return p;
}

inline shotrf::Plane constant_plane(int w, int h, std::uint8_t v) {
  return shotrf::Plane(w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, v));
}

inline shotrf::FrameSequence random_sequence(std::mt19937_64& rng, int w, int h, std::size_t n) {
  std::vector<shotrf::Plane> frames;
  for (std::size_t i = 0; i < n; ++i) frames.push_back(random_plane(rng, w, h));
  return shotrf::FrameSequence(std::move(frames));
}

inline shotrf::FrameSequence constant_sequence(int w, int h, std::size_t n, std::uint8_t v) {
  return shotrf::FrameSequence(std::vector<shotrf::Plane>(n, constant_plane(w, h, v)));
}

}  // namespace testutil
