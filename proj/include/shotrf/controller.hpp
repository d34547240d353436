#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shotrf/codec.hpp"
#include "shotrf/features.hpp"
#include "shotrf/labeler.hpp"
#include "shotrf/model.hpp"
#include "shotrf/oracle.hpp"
#include "shotrf/segmenter.hpp"

namespace shotrf {

/// Target quality and the window that accepts a first-pass encode.
struct QualityTarget {
  double target = 91.0;
  double window_low = 90.0;
  double window_high = 92.0;

  /// [target - 1, target + 1].
  static QualityTarget around(double target);
  void validate() const;
  bool accepts(double v) const { return v >= window_low && v <= window_high; }
};

struct PassResult {
  int pass_index = 1;
  double rf = 0;
  std::optional<double> measured_quality;  // pass 2 is measured only in evaluation mode
  StreamRef stream;
};

struct SegmentResult {
  std::size_t index = 0;
  Segment segment;
  std::vector<PassResult> passes;
  StreamRef accepted_stream;
  int total_passes = 0;
  std::string error;  // non-empty when the segment failed

  bool failed() const { return !error.empty(); }
};

/// Failure inside the two-pass loop; pass_index 0 means feature extraction.
class SegmentError : public Error {
 public:
  SegmentError(const std::string& what, int pass_index) : Error(what), pass_index_(pass_index) {}
  int pass_index() const { return pass_index_; }

 private:
  int pass_index_;
};

/// Schema tag of base features extended with the two feedback values.
std::string feedback_schema_version(const std::string& base_schema);

/// Without feedback returns base; with it returns base ++ [rf1, vmaf1].
FeatureVector assemble_features(const FeatureVector& base, std::optional<std::pair<double, double>> feedback);

/// Predict, encode, measure; re-predict with feedback and encode again when
/// the first measurement falls outside the window. The second stream is
/// accepted unconditionally and measured only when measure_second_pass is set.
SegmentResult encode_segment_two_pass(const SegmentJob& job, const ModelParams& model1, const ModelParams& model2,
                                      Encoder& encoder, QualityMeter& meter, const QualityTarget& qt,
                                      bool measure_second_pass);

/// RF predictor for one feature vector; lets tests substitute exact oracles.
using Predictor = std::function<double(const FeatureVector&)>;
SegmentResult encode_segment_two_pass(const SegmentJob& job, const Predictor& pass1, const Predictor& pass2,
                                      Encoder& encoder, QualityMeter& meter, const QualityTarget& qt,
                                      bool measure_second_pass);

/// A segment before feature extraction.
struct SegmentInput {
  Segment segment;
  std::shared_ptr<const FrameSequence> frames;
  std::optional<SyntheticCurveParams> curve;
  std::uint64_t seed = 0;
};

/// Shots of a decoded video. Seeds derive from run_seed and segment index.
std::vector<SegmentInput> inputs_from_video(const FrameSequence& video, const ShotDetectorConfig& shots,
                                            std::uint64_t run_seed);

/// Rendered clips of a synthetic corpus, carrying their explicit curves.
std::vector<SegmentInput> inputs_from_corpus(std::span<const SyntheticSegment> corpus, const RenderConfig& render = {});

/// Features for every input through the cache. Throws on the first failure.
std::vector<SegmentJob> prepare_jobs(std::span<const SegmentInput> inputs, FeatureCache& cache,
                                     const PrecodeSource& precode, std::size_t workers);

struct PipelineConfig {
  QualityTarget target;
  bool measure_second_pass = false;
  std::size_t workers = 1;
  PrecodeSource precode;
};

struct RunReport {
  std::vector<SegmentResult> segments;  // sorted by segment index
  std::size_t cache_hits = 0;
  std::size_t feature_computations = 0;

  std::size_t failures() const;
  double mean_passes() const;  // over successful segments
};

/// Feature extraction and the two-pass loop for each segment on a worker
/// pool. Segment failures are recorded and the run continues.
RunReport run_pipeline(std::span<const SegmentInput> inputs, const ModelParams& model1, const ModelParams& model2,
                       Encoder& encoder, QualityMeter& meter, FeatureCache& cache, const PipelineConfig& cfg);

/// Run records: header `index,start_frame,end_frame,source_id,rf1,v1,rf2,v2,passes,stream,error`;
/// absent values are empty cells.
void write_run_records(std::ostream& out, const RunReport& report);

struct AccuracyRecord {
  double pass1_quality = 0;
  std::optional<double> final_quality;  // absent when an accepted pass 2 was not measured
  int passes = 1;
};

std::vector<AccuracyRecord> accuracy_records(const RunReport& report);
std::vector<AccuracyRecord> read_accuracy_records(std::istream& run_records);

struct HistogramBin {
  double low = 0;
  double high = 0;
  std::size_t pass1 = 0;
  std::size_t final = 0;
};

struct AccuracyReport {
  double target = 91.0;
  std::vector<double> bands;
  std::vector<double> pass1_percent;  // share with |V - target| < band after pass 1
  std::vector<double> final_percent;  // same for the accepted stream, over measured finals
  std::size_t segments = 0;
  std::size_t final_measured = 0;
  double mean_passes = 0;
  double second_pass_percent = 0;
  std::vector<HistogramBin> histogram;  // 0.5-wide bins over target +- 10, open-ended outer bins
};

inline constexpr std::array<double, 4> kDefaultBands{1.0, 2.0, 3.0, 4.0};

AccuracyReport accuracy_report(std::span<const AccuracyRecord> results, double target,
                               std::span<const double> bands = kDefaultBands);
void write_accuracy_table(std::ostream& out, const AccuracyReport& r, const std::optional<AccuracyReport>& baseline);
void write_histogram(std::ostream& out, const AccuracyReport& r);

/// Ground-truth RF of one segment; the k-th probe is encoded as pass 1000 + k.
LabelResult label_job(const SegmentJob& job, Encoder& encoder, QualityMeter& meter, const LabelSearchConfig& cfg);
std::vector<LabelResult> label_jobs(std::span<const SegmentJob> jobs, Encoder& encoder, QualityMeter& meter,
                                    const LabelSearchConfig& cfg, std::size_t workers = 1);

/// Pass-1 training set: base features with their labels.
std::vector<LabeledExample> first_pass_examples(std::span<const SegmentJob> jobs, std::span<const double> labels);

/// Pass-2 training set: model1 predicts, the segment is encoded and measured
/// as a real first pass would be, and the feedback pair joins the features.
std::vector<LabeledExample> second_pass_examples(std::span<const SegmentJob> jobs, std::span<const double> labels,
                                                 const ModelParams& model1, Encoder& encoder, QualityMeter& meter,
                                                 std::size_t workers = 1);

struct BaselineResult {
  double rf = 0;
  double mean_quality = 0;
  std::vector<double> qualities;  // per job, in order
  std::size_t evaluations = 0;
};

/// The single RF whose corpus-mean quality is closest to target (searched
/// with tolerance 0.05), and every segment's quality at that RF.
BaselineResult fixed_rf_baseline(std::span<const SegmentJob> jobs, Encoder& encoder, QualityMeter& meter,
                                 double target, std::size_t workers = 1);

}  // namespace shotrf
