#include "shotrf/precode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include "shotrf/error.hpp"
#include "shotrf/stats.hpp"
#include "shotrf/textio.hpp"

namespace shotrf {

void FeatureSchema::validate() const {
  if (version.empty()) throw Error("feature schema: empty version");
  for (const auto* names : {&intra_names, &inter_names}) {
    std::set<std::string> seen;
    for (const auto& n : *names) {
      if (n.empty()) throw Error("feature schema: empty feature name");
      if (!seen.insert(n).second) throw Error("feature schema: duplicate feature name '" + n + "'");
    }
  }
}

std::vector<std::string> FeatureSchema::vector_names() const {
  std::vector<std::string> out;
  for (const auto& n : intra_names) {
    for (auto s : StatSummary::kNames) out.push_back("intra_" + n + "_" + std::string(s));
  }
  for (const auto& n : inter_names) {
    for (auto s : StatSummary::kNames) out.push_back("inter_" + n + "_" + std::string(s));
  }
  return out;
}

const FeatureSchema& builtin_schema() {
  static const FeatureSchema schema{
      "precode-builtin-v1",
      {"coded_bytes", "ratio_mb_4x4", "ratio_mb_8x8", "ratio_mb_16x16", "ratio_mode_dc", "ratio_mode_planar_like",
       "ratio_mode_directional", "mean_residual_energy", "mean_gradient_magnitude", "ratio_flat_blocks"},
      {"coded_bytes", "ratio_intra_blocks", "ratio_inter_blocks", "ratio_skip_blocks", "mean_mv_length",
       "std_mv_length", "mean_sad_after_me", "ratio_zero_mv"}};
  return schema;
}

std::vector<CodingEntry> reorganize(std::size_t frame_count) {
  if (frame_count < 2) throw DimensionError("reorganize: need at least 2 frames");
  std::vector<CodingEntry> out;
  out.reserve(2 * frame_count - 2);
  for (std::size_t i = 0; i + 1 < frame_count; ++i) {
    out.push_back({i, CodingMode::Intra, i});
    out.push_back({i + 1, CodingMode::Inter, i});
  }
  return out;
}

std::vector<double> IntraFrameStats::values() const {
  return {coded_bytes,   ratio_mb_4x4,           ratio_mb_8x8,         ratio_mb_16x16,          ratio_mode_dc,
          ratio_mode_planar_like, ratio_mode_directional, mean_residual_energy, mean_gradient_magnitude,
          ratio_flat_blocks};
}

std::vector<double> InterFrameStats::values() const {
  return {coded_bytes,    ratio_intra_blocks, ratio_inter_blocks, ratio_skip_blocks,
          mean_mv_length, std_mv_length,      mean_sad_after_me,  ratio_zero_mv};
}

double MotionVector::length() const { return std::sqrt(static_cast<double>(dx * dx + dy * dy)); }

namespace {

struct Neighbors {
  std::vector<int> top;
  std::vector<int> left;
};

Neighbors neighbors(const Plane& f, int x0, int y0, int block) {
  Neighbors n{std::vector<int>(static_cast<std::size_t>(block)), std::vector<int>(static_cast<std::size_t>(block))};
  const int ty = std::max(y0 - 1, 0);
  const int lx = std::max(x0 - 1, 0);
  for (int i = 0; i < block; ++i) {
    n.top[static_cast<std::size_t>(i)] = f.at(x0 + i, ty);
    n.left[static_cast<std::size_t>(i)] = f.at(lx, y0 + i);
  }
  return n;
}

int dc_value(const Neighbors& n) {
  int sum = 0;
  for (int v : n.top) sum += v;
  for (int v : n.left) sum += v;
  const int count = static_cast<int>(n.top.size() + n.left.size());
  return (sum + count / 2) / count;
}

std::uint64_t dc_sad(const Plane& f, int x0, int y0, int block) {
  const int dc = dc_value(neighbors(f, x0, y0, block));
  std::uint64_t sad = 0;
  for (int y = 0; y < block; ++y) {
    for (int x = 0; x < block; ++x) sad += static_cast<std::uint64_t>(std::abs(f.at(x0 + x, y0 + y) - dc));
  }
  return sad;
}

enum class IntraMode { Dc, Planar, Vertical, Horizontal };

int predict(IntraMode mode, const Neighbors& n, int dc, int x, int y, int block) {
  const auto ux = static_cast<std::size_t>(x);
  const auto uy = static_cast<std::size_t>(y);
  switch (mode) {
    case IntraMode::Dc: return dc;
    case IntraMode::Vertical: return n.top[ux];
    case IntraMode::Horizontal: return n.left[uy];
    case IntraMode::Planar: {
      const int top_right = n.top.back();
      const int bottom_left = n.left.back();
      const int h = (block - 1 - x) * n.left[uy] + (x + 1) * top_right;
      const int v = (block - 1 - y) * n.top[ux] + (y + 1) * bottom_left;
      return (h + v + block) / (2 * block);
    }
  }
  return dc;
}

std::uint64_t block_sad(const Plane& a, int ax, int ay, const Plane& b, int bx, int by, int block) {
  std::uint64_t sad = 0;
  for (int y = 0; y < block; ++y) {
    const std::uint8_t* ra = a.samples().data() + static_cast<std::size_t>(ay + y) * a.width() + ax;
    const std::uint8_t* rb = b.samples().data() + static_cast<std::size_t>(by + y) * b.width() + bx;
    for (int x = 0; x < block; ++x) sad += static_cast<std::uint64_t>(std::abs(int(ra[x]) - int(rb[x])));
  }
  return sad;
}

void require_block_fits(const Plane& f, int block, const char* who) {
  if (block < 1 || f.width() < block || f.height() < block) {
    throw DimensionError(std::string(who) + ": frame smaller than block");
  }
}

}  // namespace

IntraFrameStats analyze_intra(const Plane& frame, int block) {
  require_block_fits(frame, block, "analyze_intra");
  const int bw = frame.width() / block;
  const int bh = frame.height() / block;
  const double area = static_cast<double>(block) * block;

  IntraFrameStats s;
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      const int x0 = bx * block;
      const int y0 = by * block;
      const Neighbors n = neighbors(frame, x0, y0, block);
      const int dc = dc_value(n);

      std::uint64_t best_sad = std::numeric_limits<std::uint64_t>::max();
      std::uint64_t best_sse = 0;
      IntraMode best = IntraMode::Dc;
      for (IntraMode mode : {IntraMode::Dc, IntraMode::Planar, IntraMode::Vertical, IntraMode::Horizontal}) {
        std::uint64_t sad = 0, sse = 0;
        for (int y = 0; y < block; ++y) {
          for (int x = 0; x < block; ++x) {
            const int r = frame.at(x0 + x, y0 + y) - predict(mode, n, dc, x, y, block);
            sad += static_cast<std::uint64_t>(std::abs(r));
            sse += static_cast<std::uint64_t>(r * r);
          }
        }
        if (sad < best_sad) {
          best_sad = sad;
          best_sse = sse;
          best = mode;
        }
      }

      double sum = 0, sum2 = 0, grad = 0;
      for (int y = 0; y < block; ++y) {
        for (int x = 0; x < block; ++x) {
          const double v = frame.at(x0 + x, y0 + y);
          sum += v;
          sum2 += v * v;
          if (x + 1 < block) grad += std::abs(frame.at(x0 + x + 1, y0 + y) - frame.at(x0 + x, y0 + y));
          if (y + 1 < block) grad += std::abs(frame.at(x0 + x, y0 + y + 1) - frame.at(x0 + x, y0 + y));
        }
      }
      const double mean = sum / area;
      const double var = std::max(0.0, sum2 / area - mean * mean);

      if (var < kSmallBlockVariance) {
        s.ratio_mb_4x4 += 1;
      } else if (var < kMediumBlockVariance) {
        s.ratio_mb_8x8 += 1;
      } else {
        s.ratio_mb_16x16 += 1;
      }
      if (var < 1.0) s.ratio_flat_blocks += 1;
      switch (best) {
        case IntraMode::Dc: s.ratio_mode_dc += 1; break;
        case IntraMode::Planar: s.ratio_mode_planar_like += 1; break;
        default: s.ratio_mode_directional += 1; break;
      }
      s.coded_bytes += std::log2(1.0 + static_cast<double>(best_sad));
      s.mean_residual_energy += static_cast<double>(best_sse) / area;
      s.mean_gradient_magnitude += grad / area;
    }
  }
  const double blocks = static_cast<double>(bw) * bh;
  for (double* r : {&s.ratio_mb_4x4, &s.ratio_mb_8x8, &s.ratio_mb_16x16, &s.ratio_flat_blocks, &s.ratio_mode_dc,
                    &s.ratio_mode_planar_like, &s.ratio_mode_directional, &s.mean_residual_energy,
                    &s.mean_gradient_magnitude}) {
    *r /= blocks;
  }
  return s;
}

std::vector<BlockMotion> motion_field(const Plane& frame, const Plane& ref, int block, int search_range) {
  if (frame.width() != ref.width() || frame.height() != ref.height()) {
    throw DimensionError("analyze_inter: dimension mismatch");
  }
  require_block_fits(frame, block, "analyze_inter");
  const int bw = frame.width() / block;
  const int bh = frame.height() / block;

  std::vector<BlockMotion> out;
  out.reserve(static_cast<std::size_t>(bw) * bh);
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      const int x0 = bx * block;
      const int y0 = by * block;
      BlockMotion m;
      const std::uint64_t zero_sad = block_sad(frame, x0, y0, ref, x0, y0, block);
      if (zero_sad == 0) {
        out.push_back(m);
        continue;
      }
      m.inter_sad = zero_sad;
      int best_len2 = 0;
      for (int dy = -search_range; dy <= search_range; ++dy) {
        const int ry = y0 + dy;
        if (ry < 0 || ry + block > ref.height()) continue;
        for (int dx = -search_range; dx <= search_range; ++dx) {
          const int rx = x0 + dx;
          if (rx < 0 || rx + block > ref.width()) continue;
          const std::uint64_t sad = block_sad(frame, x0, y0, ref, rx, ry, block);
          const int len2 = dx * dx + dy * dy;
          if (sad < m.inter_sad || (sad == m.inter_sad && len2 < best_len2)) {
            m.inter_sad = sad;
            m.mv = {dx, dy};
            best_len2 = len2;
          }
        }
      }
      m.intra_sad = dc_sad(frame, x0, y0, block);
      m.kind = m.inter_sad > m.intra_sad ? BlockClass::Intra : BlockClass::Inter;
      out.push_back(m);
    }
  }
  return out;
}

InterFrameStats analyze_inter(const Plane& frame, const Plane& ref, int block, int search_range) {
  const auto field = motion_field(frame, ref, block, search_range);
  const double area = static_cast<double>(block) * block;
  InterFrameStats s;
  std::vector<double> lengths;
  for (const auto& m : field) {
    switch (m.kind) {
      case BlockClass::Skip: s.ratio_skip_blocks += 1; break;
      case BlockClass::Intra: s.ratio_intra_blocks += 1; break;
      case BlockClass::Inter: s.ratio_inter_blocks += 1; break;
    }
    if (m.mv == MotionVector{}) s.ratio_zero_mv += 1;
    if (m.kind == BlockClass::Skip) continue;
    lengths.push_back(m.mv.length());
    s.mean_sad_after_me += static_cast<double>(m.inter_sad) / area;
    const std::uint64_t cost = m.kind == BlockClass::Intra ? m.intra_sad : m.inter_sad;
    s.coded_bytes += std::log2(1.0 + static_cast<double>(cost));
  }
  const double blocks = static_cast<double>(field.size());
  s.ratio_skip_blocks /= blocks;
  s.ratio_intra_blocks /= blocks;
  s.ratio_inter_blocks /= blocks;
  s.ratio_zero_mv /= blocks;
  s.mean_sad_after_me /= blocks;
  if (!lengths.empty()) {
    const StatSummary ms = moments(lengths, 1);
    s.mean_mv_length = ms.mean;
    s.std_mv_length = ms.std;
  }
  return s;
}

PrecodeStats builtin_precode_stats(const FrameSequence& frames) {
  PrecodeStats stats;
  for (const auto& e : reorganize(frames.size())) {
    if (e.mode == CodingMode::Intra) {
      stats.intra.push_back(analyze_intra(frames[e.frame]).values());
    } else {
      stats.inter.push_back(analyze_inter(frames[e.frame], frames[e.reference]).values());
    }
  }
  return stats;
}

std::vector<double> aggregate_precode(const PrecodeStats& stats, const FeatureSchema& schema) {
  if (stats.intra.empty() || stats.inter.empty()) {
    throw DimensionError("aggregate_precode: need at least one intra and one inter frame");
  }
  std::vector<double> out;
  out.reserve(schema.dimension());
  auto summarize = [&](const std::vector<std::vector<double>>& rows, std::size_t width) {
    std::vector<double> column(rows.size());
    for (std::size_t k = 0; k < width; ++k) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != width) throw DimensionError("aggregate_precode: row width does not match schema");
        column[i] = rows[i][k];
      }
      for (double v : moments(column, kPrecodeHistBins).as_array()) out.push_back(v);
    }
  };
  summarize(stats.intra, schema.intra_names.size());
  summarize(stats.inter, schema.inter_names.size());
  return out;
}

std::vector<double> precoding_vector(const FrameSequence& frames, const FeatureSchema& schema) {
  if (!(schema == builtin_schema())) {
    throw Error("precoding_vector: the built-in analyzer only produces schema " + builtin_schema().version);
  }
  return aggregate_precode(builtin_precode_stats(frames), schema);
}

namespace {

std::vector<std::string> log_columns(const FeatureSchema& schema) {
  std::vector<std::string> cols = schema.intra_names;
  for (const auto& n : schema.inter_names) {
    if (std::find(cols.begin(), cols.end(), n) == cols.end()) cols.push_back(n);
  }
  return cols;
}

}  // namespace

PrecodeStats parse_stats_log(std::istream& in, const FeatureSchema& schema) {
  schema.validate();
  std::string line;
  if (!std::getline(in, line)) throw ParseError("stats log: empty file");
  const auto header = split(trim(line), ',');
  if (header.size() < 2 || trim(header[0]) != "frame_index" || trim(header[1]) != "mode") {
    throw ParseError("stats log line 1: header must start with frame_index,mode");
  }
  const auto expected = log_columns(schema);
  std::map<std::string, std::size_t> position;
  for (std::size_t c = 2; c < header.size(); ++c) {
    const std::string name(trim(header[c]));
    if (std::find(expected.begin(), expected.end(), name) == expected.end()) {
      throw ParseError("stats log line 1: unknown column '" + name + "'");
    }
    if (!position.emplace(name, c).second) throw ParseError("stats log line 1: duplicate column '" + name + "'");
  }
  for (const auto& name : expected) {
    if (!position.count(name)) throw ParseError("stats log line 1: missing column '" + name + "'");
  }

  PrecodeStats stats;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    const std::string where = "stats log line " + std::to_string(line_no);
    if (cells.size() != header.size()) throw ParseError(where + ": expected " + std::to_string(header.size()) + " cells");
    try {
      parse_int(cells[0], "frame_index");
      const std::string mode(trim(cells[1]));
      const bool intra = mode == "I";
      if (!intra && mode != "P") throw ParseError("mode must be I or P, got '" + mode + "'");
      const auto& names = intra ? schema.intra_names : schema.inter_names;
      std::vector<double> row;
      row.reserve(names.size());
      for (const auto& n : names) row.push_back(parse_double(cells[position.at(n)], n));
      (intra ? stats.intra : stats.inter).push_back(std::move(row));
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return stats;
}

PrecodeStats parse_stats_log_file(const std::string& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stats log " + path);
  return parse_stats_log(in, schema);
}

void write_stats_log(std::ostream& out, const PrecodeStats& stats, const FeatureSchema& schema) {
  const auto cols = log_columns(schema);
  out << "frame_index,mode";
  for (const auto& c : cols) out << ',' << c;
  out << '\n';

  auto write_row = [&](std::size_t index, bool intra, const std::vector<double>& row) {
    const auto& names = intra ? schema.intra_names : schema.inter_names;
    out << index << ',' << (intra ? 'I' : 'P');
    for (const auto& c : cols) {
      out << ',';
      const auto it = std::find(names.begin(), names.end(), c);
      if (it != names.end()) out << format_double(row[static_cast<std::size_t>(it - names.begin())]);
    }
    out << '\n';
  };
  std::size_t index = 0;
  const std::size_t pairs = std::max(stats.intra.size(), stats.inter.size());
  for (std::size_t i = 0; i < pairs; ++i) {
    if (i < stats.intra.size()) write_row(index++, true, stats.intra[i]);
    if (i < stats.inter.size()) write_row(index++, false, stats.inter[i]);
  }
}

}  // namespace shotrf
