#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "shotrf/frameio.hpp"
#include "shotrf/precode.hpp"

namespace shotrf {

/// Ordered feature values tagged with the schema that produced them.
struct FeatureVector {
  std::string schema_version;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Where per-frame coding statistics come from.
struct PrecodeSource {
  FeatureSchema schema = builtin_schema();
  // Empty: built-in analyzer. Otherwise a stats log path; "{source_id}" and
  // "{index}" are substituted per segment.
  std::string log_path_template;

  /// Parses "builtin" or "log:<path>".
  static PrecodeSource parse(const std::string& spec);
};

/// "st40-v1/<precode schema version>"
std::string segment_schema_version(const FeatureSchema& precode);

/// Names of every value in the segment vector, in order.
std::vector<std::string> segment_feature_names(const FeatureSchema& precode);

/// Spatial-temporal (40) followed by pre-coding features.
FeatureVector extract_segment_features(const FrameSequence& frames, const PrecodeSource& precode = {},
                                       std::uint64_t source_id = 0, std::size_t index = 0);

/// Feature store keyed by segment source_id. Thread-safe.
///
/// File format, one record per line after a `# shotrf feature-cache v1` header:
///   <source_id hex16> <schema_version> <count> <v0> <v1> ...
/// Values use the shortest round-trip decimal form.
class FeatureCache {
 public:
  FeatureCache() = default;
  FeatureCache(FeatureCache&& other) noexcept;
  FeatureCache& operator=(FeatureCache&& other) noexcept;

  static FeatureCache load(std::istream& in);
  static FeatureCache load_file(const std::string& path);  // missing file -> empty cache
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

  std::optional<FeatureVector> find(std::uint64_t source_id) const;
  void put(std::uint64_t source_id, FeatureVector v);

  /// Cached value when schema matches, otherwise computes and stores.
  FeatureVector get_or_compute(std::uint64_t source_id, const std::string& schema_version,
                               const std::function<FeatureVector()>& compute);

  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::uint64_t, FeatureVector> entries_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace shotrf
