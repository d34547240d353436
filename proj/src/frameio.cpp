#include "shotrf/frameio.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "shotrf/error.hpp"

namespace shotrf {

Plane::Plane(int width, int height) : Plane(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width > 0 ? width : 0) * (height > 0 ? height : 0))) {}

Plane::Plane(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("plane dimensions must be positive, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
  if (samples_.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionError("plane sample count " + std::to_string(samples_.size()) + " does not match " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
}

FrameSequence::FrameSequence(std::vector<Plane> frames, FrameRate rate) : frames_(std::move(frames)), rate_(rate) {
  if (frames_.empty()) throw DimensionError("frame sequence must hold at least one frame");
  for (const auto& f : frames_) {
    if (f.width() != frames_.front().width() || f.height() != frames_.front().height()) {
      throw DimensionError("all frames of a sequence must share dimensions");
    }
  }
}

FrameSequence FrameSequence::slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > frames_.size()) throw DimensionError("invalid frame slice");
  return FrameSequence({frames_.begin() + static_cast<std::ptrdiff_t>(begin),
                        frames_.begin() + static_cast<std::ptrdiff_t>(end)},
                       rate_);
}

namespace {

int parse_positive(const std::string& token, const char* what) {
  int v = 0;
  const char* first = token.data() + 1;
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || v <= 0) {
    throw ParseError(std::string("y4m header: bad ") + what + " token '" + token + "'");
  }
  return v;
}

struct Header {
  int width = 0;
  int height = 0;
  FrameRate rate;
  std::size_t chroma_bytes = 0;  // skipped after each luma plane
};

Header parse_header(const std::string& line) {
  std::istringstream ss(line);
  std::string magic;
  ss >> magic;
  if (magic != "YUV4MPEG2") throw ParseError("y4m header: bad magic '" + magic + "'");
  Header h;
  std::string colorspace = "420jpeg";
  std::string token;
  while (ss >> token) {
    switch (token[0]) {
      case 'W': h.width = parse_positive(token, "width"); break;
      case 'H': h.height = parse_positive(token, "height"); break;
      case 'F': {
        auto colon = token.find(':');
        if (colon == std::string::npos) throw ParseError("y4m header: bad frame rate token '" + token + "'");
        h.rate.num = parse_positive(token.substr(0, colon), "frame rate");
        h.rate.den = parse_positive("F" + token.substr(colon + 1), "frame rate");
        break;
      }
      case 'C': colorspace = token.substr(1); break;
      case 'I':
      case 'A':
      case 'X': break;
      default: throw ParseError("y4m header: unknown token '" + token + "'");
    }
  }
  if (h.width == 0) throw ParseError("y4m header: missing W token");
  if (h.height == 0) throw ParseError("y4m header: missing H token");
  if (colorspace.find("p1") != std::string::npos || colorspace.rfind("mono1", 0) == 0) {
    throw ParseError("y4m header: only 8-bit samples are supported, got 'C" + colorspace + "'");
  }
  if (colorspace.rfind("420", 0) == 0) {
    const std::size_t cw = (static_cast<std::size_t>(h.width) + 1) / 2;
    const std::size_t ch = (static_cast<std::size_t>(h.height) + 1) / 2;
    h.chroma_bytes = 2 * cw * ch;
  } else if (colorspace == "mono") {
    h.chroma_bytes = 0;
  } else {
    throw ParseError("y4m header: unsupported colorspace token 'C" + colorspace + "'");
  }
  return h;
}

}  // namespace

FrameSequence read_y4m(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("y4m: empty stream");
  const Header h = parse_header(line);
  const std::size_t luma = static_cast<std::size_t>(h.width) * h.height;

  std::vector<Plane> frames;
  while (std::getline(in, line)) {
    if (line.rfind("FRAME", 0) != 0) {
      throw ParseError("y4m: expected FRAME marker before frame " + std::to_string(frames.size()));
    }
    std::vector<std::uint8_t> samples(luma);
    in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(luma));
    if (static_cast<std::size_t>(in.gcount()) != luma) {
      throw ParseError("y4m: truncated luma payload in frame " + std::to_string(frames.size()));
    }
    in.ignore(static_cast<std::streamsize>(h.chroma_bytes));
    if (static_cast<std::size_t>(in.gcount()) != h.chroma_bytes) {
      throw ParseError("y4m: truncated chroma payload in frame " + std::to_string(frames.size()));
    }
    frames.emplace_back(h.width, h.height, std::move(samples));
  }
  if (frames.empty()) throw ParseError("y4m: stream has no frames");
  return FrameSequence(std::move(frames), h.rate);
}

FrameSequence read_y4m_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_y4m(in);
}

void write_y4m(std::ostream& out, const FrameSequence& seq, ChromaOut chroma) {
  out << "YUV4MPEG2 W" << seq.width() << " H" << seq.height() << " F" << seq.rate().num << ':' << seq.rate().den
      << " Ip A1:1 " << (chroma == ChromaOut::Mono ? "Cmono" : "C420jpeg") << '\n';
  const std::size_t cw = (static_cast<std::size_t>(seq.width()) + 1) / 2;
  const std::size_t ch = (static_cast<std::size_t>(seq.height()) + 1) / 2;
  const std::string gray(chroma == ChromaOut::Mono ? 0 : 2 * cw * ch, static_cast<char>(128));
  for (const auto& f : seq.frames()) {
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(f.samples().data()), static_cast<std::streamsize>(f.size()));
    out.write(gray.data(), static_cast<std::streamsize>(gray.size()));
  }
}

void write_y4m_file(const std::string& path, const FrameSequence& seq, ChromaOut chroma) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_y4m(out, seq, chroma);
}

double mean_abs_diff(const Plane& a, const Plane& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError("mean_abs_diff: dimension mismatch");
  }
  std::uint64_t total = 0;
  auto sa = a.samples();
  auto sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) total += static_cast<std::uint64_t>(std::abs(int(sa[i]) - int(sb[i])));
  return static_cast<double>(total) / static_cast<double>(sa.size());
}

}  // namespace shotrf
