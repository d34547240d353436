#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "shotrf/frameio.hpp"

namespace shotrf {

/// Versioned list of per-frame coding features. Every feature is summarized
/// by the five StatSummary statistics, so the vector dimension is
/// (intra_names.size() + inter_names.size()) * 5.
struct FeatureSchema {
  std::string version;
  std::vector<std::string> intra_names;
  std::vector<std::string> inter_names;

  std::size_t dimension() const { return (intra_names.size() + inter_names.size()) * 5; }
  void validate() const;  // throws on duplicate or empty names

  /// Output names "intra_<feature>_<stat>" then "inter_<feature>_<stat>".
  std::vector<std::string> vector_names() const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

/// The schema produced by the built-in analysis pre-coder (10 intra, 8 inter).
const FeatureSchema& builtin_schema();

enum class CodingMode { Intra, Inter };

struct CodingEntry {
  std::size_t frame = 0;      // index into the original sequence
  CodingMode mode = CodingMode::Intra;
  std::size_t reference = 0;  // for Inter: frame of the preceding Intra entry
};

/// The duplicated IPIP order: (f1,I),(f2,P),(f2,I),(f3,P),...,(f[n-1],I),(fn,P).
std::vector<CodingEntry> reorganize(std::size_t frame_count);

struct IntraFrameStats {
  double coded_bytes = 0;
  double ratio_mb_4x4 = 0;
  double ratio_mb_8x8 = 0;
  double ratio_mb_16x16 = 0;
  double ratio_mode_dc = 0;
  double ratio_mode_planar_like = 0;
  double ratio_mode_directional = 0;
  double mean_residual_energy = 0;
  double mean_gradient_magnitude = 0;
  double ratio_flat_blocks = 0;

  std::vector<double> values() const;  // builtin_schema().intra_names order
};

struct InterFrameStats {
  double coded_bytes = 0;
  double ratio_intra_blocks = 0;
  double ratio_inter_blocks = 0;
  double ratio_skip_blocks = 0;
  double mean_mv_length = 0;
  double std_mv_length = 0;
  double mean_sad_after_me = 0;
  double ratio_zero_mv = 0;

  std::vector<double> values() const;  // builtin_schema().inter_names order
};

inline constexpr int kPrecodeBlock = 16;
inline constexpr int kSearchRange = 8;
// Block-variance classes: below kSmallBlockVariance -> 4x4, below kMediumBlockVariance -> 8x8, else 16x16.
inline constexpr double kSmallBlockVariance = 25.0;
inline constexpr double kMediumBlockVariance = 400.0;

/// Spatial pre-coding proxy. Neighbors come from the original frame with
/// edge replication at the frame border.
IntraFrameStats analyze_intra(const Plane& frame, int block = kPrecodeBlock);

struct MotionVector {
  int dx = 0;
  int dy = 0;
  double length() const;
  friend bool operator==(const MotionVector&, const MotionVector&) = default;
};

enum class BlockClass { Skip, Intra, Inter };

struct BlockMotion {
  MotionVector mv;
  BlockClass kind = BlockClass::Skip;
  std::uint64_t inter_sad = 0;  // best full-search SAD
  std::uint64_t intra_sad = 0;  // DC predictor SAD
};

/// Full-search integer motion estimation of each block of frame against ref.
std::vector<BlockMotion> motion_field(const Plane& frame, const Plane& ref, int block = kPrecodeBlock,
                                      int search_range = kSearchRange);

InterFrameStats analyze_inter(const Plane& frame, const Plane& ref, int block = kPrecodeBlock,
                              int search_range = kSearchRange);

/// Per-frame coding statistics, one row per coded frame in schema column order.
struct PrecodeStats {
  std::vector<std::vector<double>> intra;
  std::vector<std::vector<double>> inter;
};

/// Runs the built-in analyzer over the reorganized sequence.
PrecodeStats builtin_precode_stats(const FrameSequence& frames);

/// Five statistics per feature, intra block first, in schema order.
std::vector<double> aggregate_precode(const PrecodeStats& stats, const FeatureSchema& schema);

/// Built-in path: reorganize, analyze, aggregate. Requires the builtin schema.
std::vector<double> precoding_vector(const FrameSequence& frames, const FeatureSchema& schema = builtin_schema());

/// Stats log CSV: header `frame_index,mode,<columns>` where columns are the
/// intra names followed by inter names not already listed. `mode` is I or P;
/// cells that do not apply to a row's mode are left empty.
PrecodeStats parse_stats_log(std::istream& in, const FeatureSchema& schema);
PrecodeStats parse_stats_log_file(const std::string& path, const FeatureSchema& schema);
void write_stats_log(std::ostream& out, const PrecodeStats& stats, const FeatureSchema& schema);

}  // namespace shotrf
