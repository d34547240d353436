#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace shotrf {

/// 8-bit luma raster of one frame, row-major.
class Plane {
 public:
  Plane(int width, int height);
  Plane(int width, int height, std::vector<std::uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return samples_.size(); }

  std::uint8_t at(int x, int y) const { return samples_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return samples_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<const std::uint8_t> samples() const { return samples_; }
  std::span<std::uint8_t> samples() { return samples_; }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> samples_;
};

struct FrameRate {
  int num = 25;
  int den = 1;
  double fps() const { return static_cast<double>(num) / den; }
};

/// Ordered luma frames sharing one size.
class FrameSequence {
 public:
  FrameSequence(std::vector<Plane> frames, FrameRate rate = {});

  std::size_t size() const { return frames_.size(); }
  const Plane& operator[](std::size_t i) const { return frames_[i]; }
  std::span<const Plane> frames() const { return frames_; }
  FrameRate rate() const { return rate_; }
  int width() const { return frames_.front().width(); }
  int height() const { return frames_.front().height(); }

  /// Frames [begin, end) as a new sequence.
  FrameSequence slice(std::size_t begin, std::size_t end) const;

 private:
  std::vector<Plane> frames_;
  FrameRate rate_;
};

enum class ChromaOut { Mono, Neutral420 };

/// Parses a YUV4MPEG2 stream (C420* or Cmono), keeping only luma.
FrameSequence read_y4m(std::istream& in);
FrameSequence read_y4m_file(const std::string& path);

/// Writes luma back out. Neutral420 emits mid-gray chroma so that ordinary
/// encoders accept the file.
void write_y4m(std::ostream& out, const FrameSequence& seq, ChromaOut chroma = ChromaOut::Mono);
void write_y4m_file(const std::string& path, const FrameSequence& seq, ChromaOut chroma = ChromaOut::Mono);

/// Mean of |a[i] - b[i]| over all pixels.
double mean_abs_diff(const Plane& a, const Plane& b);

}  // namespace shotrf
