#include "shotrf/segmenter.hpp"

#include <charconv>
#include <cstdio>

#include "shotrf/error.hpp"

namespace shotrf {

std::uint64_t fnv1a_luma(std::span<const Plane> frames) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& f : frames) {
    for (std::uint8_t v : f.samples()) {
      h ^= v;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string format_source_id(std::uint64_t id) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(id));
  return buf;
}

std::uint64_t parse_source_id(const std::string& text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 16);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("bad source id '" + text + "'");
  }
  return v;
}

std::vector<Segment> detect_shots(const FrameSequence& frames, const ShotDetectorConfig& cfg) {
  if (!(cfg.threshold > 0)) throw Error("detect_shots: threshold must be positive");
  if (cfg.min_shot_len < 1) throw Error("detect_shots: min_shot_len must be at least 1");

  std::vector<std::size_t> starts{0};
  for (std::size_t t = 1; t < frames.size(); ++t) {
    if (t - starts.back() >= cfg.min_shot_len && mean_abs_diff(frames[t - 1], frames[t]) > cfg.threshold) {
      starts.push_back(t);
    }
  }
  // The tail after the last cut may be shorter than min_shot_len.
  if (starts.size() > 1 && frames.size() - starts.back() < cfg.min_shot_len) starts.pop_back();

  std::vector<Segment> out;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    Segment s;
    s.start_frame = starts[i];
    s.end_frame = i + 1 < starts.size() ? starts[i + 1] : frames.size();
    s.source_id = fnv1a_luma(frames.frames().subspan(s.start_frame, s.length()));
    out.push_back(s);
  }
  return out;
}

}  // namespace shotrf
