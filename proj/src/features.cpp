#include "shotrf/features.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "shotrf/error.hpp"
#include "shotrf/segmenter.hpp"
#include "shotrf/texture.hpp"
#include "shotrf/textio.hpp"

namespace shotrf {

PrecodeSource PrecodeSource::parse(const std::string& spec) {
  if (spec == "builtin") return {};
  if (spec.rfind("log:", 0) == 0 && spec.size() > 4) {
    PrecodeSource s;
    s.log_path_template = spec.substr(4);
    return s;
  }
  throw ParseError("precode source must be 'builtin' or 'log:<path>', got '" + spec + "'");
}

std::string segment_schema_version(const FeatureSchema& precode) { return "st40-v1/" + precode.version; }

std::vector<std::string> segment_feature_names(const FeatureSchema& precode) {
  auto names = spatial_temporal_names();
  for (auto& n : precode.vector_names()) names.push_back(std::move(n));
  return names;
}

namespace {

std::string substitute(std::string text, const std::string& key, const std::string& value) {
  for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
  return text;
}

}  // namespace

FeatureVector extract_segment_features(const FrameSequence& frames, const PrecodeSource& precode,
                                       std::uint64_t source_id, std::size_t index) {
  FeatureVector fv;
  fv.schema_version = segment_schema_version(precode.schema);
  fv.values = spatial_temporal_vector(frames);
  std::vector<double> coding;
  if (precode.log_path_template.empty()) {
    coding = precoding_vector(frames, precode.schema);
  } else {
    std::string path = substitute(precode.log_path_template, "{source_id}", format_source_id(source_id));
    path = substitute(path, "{index}", std::to_string(index));
    coding = aggregate_precode(parse_stats_log_file(path, precode.schema), precode.schema);
  }
  fv.values.insert(fv.values.end(), coding.begin(), coding.end());
  for (double v : fv.values) {
    if (!std::isfinite(v)) throw Error("feature extraction produced a non-finite value");
  }
  return fv;
}

FeatureCache::FeatureCache(FeatureCache&& other) noexcept {
  std::lock_guard lock(other.mutex_);
  entries_ = std::move(other.entries_);
  hits_ = other.hits_;
  misses_ = other.misses_;
}

FeatureCache& FeatureCache::operator=(FeatureCache&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mutex_, other.mutex_);
    entries_ = std::move(other.entries_);
    hits_ = other.hits_;
    misses_ = other.misses_;
  }
  return *this;
}

FeatureCache FeatureCache::load(std::istream& in) {
  FeatureCache cache;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream ss{std::string(body)};
    std::string id, version, count_text;
    ss >> id >> version >> count_text;
    const std::string where = "feature cache line " + std::to_string(line_no);
    try {
      FeatureVector fv;
      fv.schema_version = version;
      const auto count = parse_int(count_text, "value count");
      if (count < 0) throw ParseError("negative value count");
      std::string token;
      while (ss >> token) fv.values.push_back(parse_double(token, "feature value"));
      if (fv.values.size() != static_cast<std::size_t>(count)) throw ParseError("value count mismatch");
      cache.entries_[parse_source_id(id)] = std::move(fv);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return cache;
}

FeatureCache FeatureCache::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  return load(in);
}

void FeatureCache::save(std::ostream& out) const {
  std::lock_guard lock(mutex_);
  out << "# shotrf feature-cache v1\n";
  for (const auto& [id, fv] : entries_) {
    out << format_source_id(id) << ' ' << fv.schema_version << ' ' << fv.values.size();
    for (double v : fv.values) out << ' ' << format_double(v);
    out << '\n';
  }
}

void FeatureCache::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write feature cache " + path);
  save(out);
}

std::optional<FeatureVector> FeatureCache::find(std::uint64_t source_id) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(source_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void FeatureCache::put(std::uint64_t source_id, FeatureVector v) {
  std::lock_guard lock(mutex_);
  entries_[source_id] = std::move(v);
}

FeatureVector FeatureCache::get_or_compute(std::uint64_t source_id, const std::string& schema_version,
                                           const std::function<FeatureVector()>& compute) {
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(source_id);
    if (it != entries_.end() && it->second.schema_version == schema_version) {
      ++hits_;
      return it->second;
    }
    ++misses_;
  }
  FeatureVector fv = compute();
  put(source_id, fv);
  return fv;
}

std::size_t FeatureCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t FeatureCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t FeatureCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

}  // namespace shotrf
