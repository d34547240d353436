#include <doctest.h>

#include "helpers.hpp"
#include "shotrf/segmenter.hpp"

using namespace shotrf;

namespace {

void check_tiling(const std::vector<Segment>& segs, std::size_t n) {
  REQUIRE(!segs.empty());
  CHECK(segs.front().start_frame == 0);
  CHECK(segs.back().end_frame == n);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    CHECK(segs[i].end_frame > segs[i].start_frame);
    if (i > 0) CHECK(segs[i].start_frame == segs[i - 1].end_frame);
  }
}

FrameSequence alternating(std::size_t n) {
  std::vector<Plane> frames;
  for (std::size_t i = 0; i < n; ++i) frames.push_back(testutil::constant_plane(4, 4, i % 2 ? 255 : 0));
  return FrameSequence(std::move(frames));
}

}  // namespace

TEST_CASE("identical frames form one shot") {
  const auto segs = detect_shots(testutil::constant_sequence(8, 8, 30, 77), {12.0, 25});
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].start_frame == 0);
  CHECK(segs[0].end_frame == 30);
}

TEST_CASE("black then white cuts at the change") {
  std::vector<Plane> frames(10, testutil::constant_plane(8, 8, 0));
  for (int i = 0; i < 10; ++i) frames.push_back(testutil::constant_plane(8, 8, 255));
  const auto segs = detect_shots(FrameSequence(frames), {12.0, 2});
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].end_frame == 10);
  CHECK(segs[1].start_frame == 10);
  CHECK(segs[1].end_frame == 20);
  CHECK(segs[0].source_id != segs[1].source_id);
}

TEST_CASE("alternating frames respect the minimum shot length") {
  for (std::size_t n : {5u, 7u, 23u, 50u}) {
    const auto segs = detect_shots(alternating(n), {12.0, 5});
    check_tiling(segs, n);
    for (const auto& s : segs) CHECK(s.end_frame - s.start_frame >= 5);
  }
}

TEST_CASE("shorter videos than the minimum give a single shot") {
  const auto segs = detect_shots(alternating(3), {12.0, 5});
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].end_frame == 3);
}

TEST_CASE("raising the threshold never adds segments") {
  std::mt19937_64 rng(11);
  std::vector<Plane> frames;
  std::uniform_int_distribution<int> level(0, 255);
  for (int i = 0; i < 60; ++i) frames.push_back(testutil::constant_plane(4, 4, static_cast<std::uint8_t>(level(rng))));
  const FrameSequence seq(frames);
  std::size_t previous = SIZE_MAX;
  for (double t = 1; t < 260; t += 7) {
    const auto segs = detect_shots(seq, {t, 3});
    check_tiling(segs, seq.size());
    CHECK(segs.size() <= previous);
    previous = segs.size();
  }
}

TEST_CASE("source_id is FNV-1a over the covered luma") {
  // FNV-1a 64 of the bytes {0x61} ("a") is a published test vector.
  const FrameSequence seq({Plane(1, 1, {0x61})});
  CHECK(fnv1a_luma(seq.frames()) == 0xaf63dc4c8601ec8cULL);
  const auto segs = detect_shots(seq);
  CHECK(segs[0].source_id == 0xaf63dc4c8601ec8cULL);
  CHECK(format_source_id(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
  CHECK(parse_source_id("af63dc4c8601ec8c") == 0xaf63dc4c8601ec8cULL);
}
