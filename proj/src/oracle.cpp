#include "shotrf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "shotrf/error.hpp"
#include "shotrf/model.hpp"
#include "shotrf/texture.hpp"
#include "shotrf/textio.hpp"

namespace shotrf {

namespace {

constexpr double kEasyMidpoint = 38.0;
constexpr double kEasySlope = 0.35;
constexpr double kHardMidpoint = 16.0;
constexpr double kHardSlope = 0.18;

}  // namespace

void SyntheticCurveParams::validate() const {
  if (!(slope > 0)) throw Error("synthetic curve: slope must be positive");
  if (!(ceiling > 0 && ceiling <= 100)) throw Error("synthetic curve: ceiling must be in (0, 100]");
  if (!(midpoint >= kRfMin && midpoint <= kRfMax)) throw Error("synthetic curve: midpoint must be in [0, 51]");
  if (!(noise_sigma >= 0)) throw Error("synthetic curve: noise_sigma must be non-negative");
}

double synth_quality(const SyntheticCurveParams& p, double rf, std::uint64_t seed) {
  double v = p.ceiling / (1.0 + std::exp(p.slope * (rf - p.midpoint)));
  if (p.noise_sigma > 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, p.noise_sigma);
    v += jitter(rng);
  }
  return std::clamp(v, 0.0, 100.0);
}

double synth_label(const SyntheticCurveParams& p, double target) {
  if (!(target > 0 && target < p.ceiling)) {
    throw Error("synth_label: target " + format_double(target) + " outside (0, " + format_double(p.ceiling) + ")");
  }
  return std::clamp(p.midpoint + std::log(p.ceiling / target - 1.0) / p.slope, kRfMin, kRfMax);
}

SyntheticCurveParams curve_from_features(const ComplexityDescriptor& d, double noise_sigma) {
  const double s = std::clamp(d.spatial, 0.0, 1.0);
  const double t = std::clamp(d.temporal, 0.0, 1.0);
  SyntheticCurveParams p;
  p.midpoint = kEasyMidpoint + (kHardMidpoint - kEasyMidpoint) * (0.6 * s + 0.4 * t);
  p.slope = kEasySlope + (kHardSlope - kEasySlope) * (0.3 * s + 0.7 * t);
  p.ceiling = 100.0;
  p.noise_sigma = noise_sigma;
  return p;
}

ComplexityDescriptor descriptor_from_features(const FeatureVector& features) {
  // Positions in the spatial-temporal block: contrast mean at d=1 is entry 8,
  // the mean of per-pair NCC means is entry 30.
  if (features.size() < kSpatialTemporalDim) throw DimensionError("descriptor_from_features: vector too short");
  ComplexityDescriptor d;
  d.spatial = std::clamp(features.values[8] / 30.0, 0.0, 1.0);
  d.temporal = std::clamp(1.0 - features.values[30], 0.0, 1.0);
  return d;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FrameSequence render_synthetic_segment(const ComplexityDescriptor& d, std::uint64_t seed, const RenderConfig& cfg) {
  if (cfg.frames < 2) throw DimensionError("render_synthetic_segment: need at least 2 frames");
  const double s = std::clamp(d.spatial, 0.0, 1.0);
  const double t = std::clamp(d.temporal, 0.0, 1.0);
  const int w = cfg.width;
  const int h = cfg.height;
  std::mt19937_64 rng(seed);

  const double amplitude = 4.0 + 100.0 * s;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> texture(static_cast<std::size_t>(w) * h);
  for (auto& v : texture) v = amplitude * unit(rng);

  const double speed = 6.0 * t;          // pixels per frame, horizontal
  const double flicker = 2.0 + 30.0 * t;  // fresh per-frame noise amplitude
  std::vector<Plane> frames;
  for (std::size_t f = 0; f < cfg.frames; ++f) {
    const int shift = static_cast<int>(std::lround(speed * static_cast<double>(f)));
    Plane p(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int sx = ((x - shift) % w + w) % w;
        const double base = 50.0 + 1.5 * (sx + y);
        const double v = base + texture[static_cast<std::size_t>(y) * w + sx] + flicker * unit(rng);
        p.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
    frames.push_back(std::move(p));
  }
  return FrameSequence(std::move(frames));
}

std::vector<SyntheticSegment> generate_corpus(std::size_t count, std::uint64_t seed, double noise_sigma) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SyntheticSegment> corpus;
  corpus.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SyntheticSegment seg;
    seg.index = i;
    seg.descriptor.spatial = unit(rng);
    seg.descriptor.temporal = unit(rng);
    seg.curve = curve_from_features(seg.descriptor, noise_sigma);
    seg.seed = mix_seed(seed, i);
    corpus.push_back(seg);
  }
  return corpus;
}

void write_corpus(std::ostream& out, const std::vector<SyntheticSegment>& corpus) {
  out << "# shotrf synthetic-corpus v1\n";
  out << "# index spatial temporal midpoint slope ceiling noise_sigma seed\n";
  for (const auto& s : corpus) {
    out << s.index << ' ' << format_double(s.descriptor.spatial) << ' ' << format_double(s.descriptor.temporal) << ' '
        << format_double(s.curve.midpoint) << ' ' << format_double(s.curve.slope) << ' '
        << format_double(s.curve.ceiling) << ' ' << format_double(s.curve.noise_sigma) << ' ' << s.seed << '\n';
  }
}

std::vector<SyntheticSegment> read_corpus(std::istream& in) {
  std::vector<SyntheticSegment> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream ss{std::string(body)};
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    const std::string where = "corpus line " + std::to_string(line_no);
    if (tok.size() != 8) throw ParseError(where + ": expected 8 fields, got " + std::to_string(tok.size()));
    try {
      SyntheticSegment s;
      s.index = static_cast<std::size_t>(parse_int(tok[0], "index"));
      s.descriptor = {parse_double(tok[1], "spatial"), parse_double(tok[2], "temporal")};
      s.curve = {parse_double(tok[3], "midpoint"), parse_double(tok[4], "slope"), parse_double(tok[5], "ceiling"),
                 parse_double(tok[6], "noise_sigma")};
      s.curve.validate();
      s.seed = std::stoull(tok[7]);
      corpus.push_back(s);
    } catch (const std::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return corpus;
}

void write_corpus_file(const std::string& path, const std::vector<SyntheticSegment>& corpus) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus " + path);
  write_corpus(out, corpus);
}

std::vector<SyntheticSegment> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus " + path);
  return read_corpus(in);
}

}  // namespace shotrf
