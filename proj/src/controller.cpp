#include "shotrf/controller.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <mutex>
#include <ostream>

#include "shotrf/labeler.hpp"
#include "shotrf/parallel.hpp"
#include "shotrf/textio.hpp"

namespace shotrf {

StreamRef SyntheticCodec::encode(const SegmentJob& job, double rf, int pass) {
  return {"synthetic:" + std::to_string(job.index) + ":p" + std::to_string(pass), rf};
}

double SyntheticCodec::measure(const SegmentJob& job, const StreamRef& stream, int pass) {
  return synth_quality(curve_for(job), stream.rf, mix_seed(job.seed, static_cast<std::uint64_t>(pass)));
}

SyntheticCurveParams SyntheticCodec::curve_for(const SegmentJob& job) const {
  if (job.curve) return *job.curve;
  return curve_from_features(descriptor_from_features(job.features), noise_sigma_);
}

QualityTarget QualityTarget::around(double target) { return {target, target - 1.0, target + 1.0}; }

void QualityTarget::validate() const {
  if (!(window_low < target && target < window_high)) {
    throw Error("quality target must satisfy window_low < target < window_high");
  }
  if (!(target > 0 && target < 100)) throw Error("quality target must lie in (0, 100)");
}

std::string feedback_schema_version(const std::string& base_schema) { return base_schema + "+feedback2"; }

FeatureVector assemble_features(const FeatureVector& base, std::optional<std::pair<double, double>> feedback) {
  if (!feedback) return base;
  FeatureVector out;
  out.schema_version = feedback_schema_version(base.schema_version);
  out.values.reserve(base.size() + 2);
  out.values = base.values;
  out.values.push_back(feedback->first);
  out.values.push_back(feedback->second);
  return out;
}

SegmentResult encode_segment_two_pass(const SegmentJob& job, const ModelParams& model1, const ModelParams& model2,
                                      Encoder& encoder, QualityMeter& meter, const QualityTarget& qt,
                                      bool measure_second_pass) {
  return encode_segment_two_pass(
      job, [&](const FeatureVector& x) { return predict(model1, x); },
      [&](const FeatureVector& x) { return predict(model2, x); }, encoder, meter, qt, measure_second_pass);
}

SegmentResult encode_segment_two_pass(const SegmentJob& job, const Predictor& pass1, const Predictor& pass2,
                                      Encoder& encoder, QualityMeter& meter, const QualityTarget& qt,
                                      bool measure_second_pass) {
  SegmentResult result;
  result.index = job.index;
  result.segment = job.segment;

  auto run_pass = [&](int pass, const FeatureVector& x, const Predictor& model, bool measure) {
    PassResult p;
    p.pass_index = pass;
    try {
      p.rf = std::clamp(model(x), kRfMin, kRfMax);
      p.stream = encoder.encode(job, p.rf, pass);
      if (measure) p.measured_quality = meter.measure(job, p.stream, pass);
    } catch (const std::exception& e) {
      throw SegmentError("segment " + std::to_string(job.index) + " pass " + std::to_string(pass) + ": " + e.what(),
                         pass);
    }
    return p;
  };

  const PassResult first = run_pass(1, job.features, pass1, true);
  result.passes.push_back(first);
  if (!qt.accepts(*first.measured_quality)) {
    const FeatureVector x2 = assemble_features(job.features, std::pair{first.rf, *first.measured_quality});
    result.passes.push_back(run_pass(2, x2, pass2, measure_second_pass));
  }
  result.total_passes = static_cast<int>(result.passes.size());
  result.accepted_stream = result.passes.back().stream;
  return result;
}

std::vector<SegmentInput> inputs_from_video(const FrameSequence& video, const ShotDetectorConfig& shots,
                                            std::uint64_t run_seed) {
  std::vector<SegmentInput> out;
  const auto segments = detect_shots(video, shots);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    SegmentInput in;
    in.segment = segments[i];
    in.frames = std::make_shared<const FrameSequence>(video.slice(segments[i].start_frame, segments[i].end_frame));
    in.seed = mix_seed(run_seed, segments[i].source_id ^ i);
    out.push_back(std::move(in));
  }
  return out;
}

std::vector<SegmentInput> inputs_from_corpus(std::span<const SyntheticSegment> corpus, const RenderConfig& render) {
  std::vector<SegmentInput> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    SegmentInput in;
    auto frames = std::make_shared<const FrameSequence>(render_synthetic_segment(s.descriptor, s.seed, render));
    in.segment = {0, frames->size(), fnv1a_luma(frames->frames())};
    in.frames = std::move(frames);
    in.curve = s.curve;
    in.seed = s.seed;
    out.push_back(std::move(in));
  }
  return out;
}

namespace {

SegmentJob make_job(std::size_t index, const SegmentInput& in, FeatureCache& cache, const PrecodeSource& precode) {
  SegmentJob job;
  job.index = index;
  job.segment = in.segment;
  job.frames = in.frames;
  job.curve = in.curve;
  job.seed = in.seed;
  job.features = cache.get_or_compute(in.segment.source_id, segment_schema_version(precode.schema), [&] {
    if (!in.frames) throw Error("segment " + std::to_string(index) + " has no frames to extract features from");
    return extract_segment_features(*in.frames, precode, in.segment.source_id, index);
  });
  return job;
}

}  // namespace

std::vector<SegmentJob> prepare_jobs(std::span<const SegmentInput> inputs, FeatureCache& cache,
                                     const PrecodeSource& precode, std::size_t workers) {
  std::vector<SegmentJob> jobs(inputs.size());
  std::vector<std::string> errors(inputs.size());
  parallel_for(inputs.size(), workers, [&](std::size_t i) {
    try {
      jobs[i] = make_job(i, inputs[i], cache, precode);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw SegmentError("segment " + std::to_string(i) + " features: " + errors[i], 0);
  }
  return jobs;
}

std::size_t RunReport::failures() const {
  return static_cast<std::size_t>(std::count_if(segments.begin(), segments.end(), [](const auto& s) { return s.failed(); }));
}

double RunReport::mean_passes() const {
  double total = 0;
  std::size_t n = 0;
  for (const auto& s : segments) {
    if (s.failed()) continue;
    total += s.total_passes;
    ++n;
  }
  return n ? total / static_cast<double>(n) : 0.0;
}

RunReport run_pipeline(std::span<const SegmentInput> inputs, const ModelParams& model1, const ModelParams& model2,
                       Encoder& encoder, QualityMeter& meter, FeatureCache& cache, const PipelineConfig& cfg) {
  cfg.target.validate();
  const std::size_t hits_before = cache.hits();
  const std::size_t misses_before = cache.misses();

  RunReport report;
  report.segments.resize(inputs.size());
  parallel_for(inputs.size(), cfg.workers, [&](std::size_t i) {
    SegmentResult& out = report.segments[i];
    out.index = i;
    out.segment = inputs[i].segment;
    SegmentJob job;
    try {
      job = make_job(i, inputs[i], cache, cfg.precode);
    } catch (const std::exception& e) {
      out.error = "segment " + std::to_string(i) + " features: " + e.what();
      return;
    }
    try {
      out = encode_segment_two_pass(job, model1, model2, encoder, meter, cfg.target, cfg.measure_second_pass);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });
  report.cache_hits = cache.hits() - hits_before;
  report.feature_computations = cache.misses() - misses_before;
  return report;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

constexpr const char* kRunHeader = "index,start_frame,end_frame,source_id,rf1,v1,rf2,v2,passes,stream,error";

}  // namespace

void write_run_records(std::ostream& out, const RunReport& report) {
  out << kRunHeader << '\n';
  for (const auto& s : report.segments) {
    out << s.index << ',' << s.segment.start_frame << ',' << s.segment.end_frame << ','
        << format_source_id(s.segment.source_id) << ',';
    std::optional<double> rf1, v1, rf2, v2;
    if (!s.passes.empty()) {
      rf1 = s.passes[0].rf;
      v1 = s.passes[0].measured_quality;
    }
    if (s.passes.size() > 1) {
      rf2 = s.passes[1].rf;
      v2 = s.passes[1].measured_quality;
    }
    out << cell(rf1) << ',' << cell(v1) << ',' << cell(rf2) << ',' << cell(v2) << ',' << s.total_passes << ','
        << csv_escape(s.accepted_stream.handle) << ',' << csv_escape(s.error) << '\n';
  }
}

std::vector<AccuracyRecord> accuracy_records(const RunReport& report) {
  std::vector<AccuracyRecord> out;
  for (const auto& s : report.segments) {
    if (s.failed() || s.passes.empty()) continue;
    AccuracyRecord r;
    r.pass1_quality = *s.passes.front().measured_quality;
    r.final_quality = s.passes.back().measured_quality;
    r.passes = s.total_passes;
    out.push_back(r);
  }
  return out;
}

std::vector<AccuracyRecord> read_accuracy_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kRunHeader) throw ParseError("run records line 1: unexpected header");
  std::vector<AccuracyRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(std::string(trim(line)));
    const std::string where = "run records line " + std::to_string(line_no);
    if (cells.size() != 11) throw ParseError(where + ": expected 11 cells");
    if (!cells[10].empty() || cells[5].empty()) continue;  // failed segment
    try {
      AccuracyRecord r;
      r.pass1_quality = parse_double(cells[5], "v1");
      r.passes = static_cast<int>(parse_int(cells[8], "passes"));
      if (r.passes == 1) {
        r.final_quality = r.pass1_quality;
      } else if (!cells[7].empty()) {
        r.final_quality = parse_double(cells[7], "v2");
      }
      out.push_back(r);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

AccuracyReport accuracy_report(std::span<const AccuracyRecord> results, double target, std::span<const double> bands) {
  if (results.empty()) throw Error("accuracy_report: no results");
  AccuracyReport r;
  r.target = target;
  r.bands.assign(bands.begin(), bands.end());
  r.segments = results.size();
  r.pass1_percent.assign(bands.size(), 0.0);
  r.final_percent.assign(bands.size(), 0.0);

  constexpr double kHalfSpan = 10.0;
  constexpr double kBinWidth = 0.5;
  const auto inner_bins = static_cast<std::size_t>(2 * kHalfSpan / kBinWidth);
  r.histogram.push_back({-INFINITY, target - kHalfSpan, 0, 0});
  for (std::size_t b = 0; b < inner_bins; ++b) {
    const double lo = target - kHalfSpan + kBinWidth * static_cast<double>(b);
    r.histogram.push_back({lo, lo + kBinWidth, 0, 0});
  }
  r.histogram.push_back({target + kHalfSpan, INFINITY, 0, 0});
  auto bin_of = [&](double v) -> HistogramBin& {
    if (v < target - kHalfSpan) return r.histogram.front();
    if (v >= target + kHalfSpan) return r.histogram.back();
    auto b = static_cast<std::size_t>(std::floor((v - (target - kHalfSpan)) / kBinWidth));
    return r.histogram[1 + std::min(b, inner_bins - 1)];
  };

  double passes = 0;
  std::size_t second = 0;
  for (const auto& res : results) {
    passes += res.passes;
    if (res.passes > 1) ++second;
    ++bin_of(res.pass1_quality).pass1;
    for (std::size_t b = 0; b < bands.size(); ++b) {
      if (std::abs(res.pass1_quality - target) < bands[b]) r.pass1_percent[b] += 1;
    }
    if (!res.final_quality) continue;
    ++r.final_measured;
    ++bin_of(*res.final_quality).final;
    for (std::size_t b = 0; b < bands.size(); ++b) {
      if (std::abs(*res.final_quality - target) < bands[b]) r.final_percent[b] += 1;
    }
  }
  for (auto& p : r.pass1_percent) p *= 100.0 / static_cast<double>(results.size());
  for (auto& p : r.final_percent) p = r.final_measured ? p * 100.0 / static_cast<double>(r.final_measured) : 0.0;
  r.mean_passes = passes / static_cast<double>(results.size());
  r.second_pass_percent = 100.0 * static_cast<double>(second) / static_cast<double>(results.size());
  return r;
}

void write_accuracy_table(std::ostream& out, const AccuracyReport& r, const std::optional<AccuracyReport>& baseline) {
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(2);
  out << "method";
  for (double b : r.bands) out << "\t|V-" << r.target << "|<" << b;
  out << '\n';
  auto row = [&](const char* name, const std::vector<double>& pct) {
    out << name;
    for (double p : pct) out << '\t' << p << '%';
    out << '\n';
  };
  if (baseline) row("fixed-rf", baseline->pass1_percent);
  row("pass-1", r.pass1_percent);
  if (r.final_measured > 0) row("final", r.final_percent);
  out << "segments\t" << r.segments << "\nfinal measured\t" << r.final_measured << "\nmean passes\t"
      << r.mean_passes << "\nsecond pass\t" << r.second_pass_percent << "%\n";
  out.flags(flags);
}

void write_histogram(std::ostream& out, const AccuracyReport& r) {
  out << "low,high,pass1,final\n";
  for (const auto& b : r.histogram) {
    out << format_double(b.low) << ',' << format_double(b.high) << ',' << b.pass1 << ',' << b.final << '\n';
  }
}

BaselineResult fixed_rf_baseline(std::span<const SegmentJob> jobs, Encoder& encoder, QualityMeter& meter,
                                 double target, std::size_t workers) {
  if (jobs.empty()) throw Error("fixed_rf_baseline: no segments");
  BaselineResult out;
  std::vector<double> qualities(jobs.size());
  auto measure_all = [&](double rf) {
    std::vector<std::string> errors(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
      try {
        qualities[i] = meter.measure(jobs[i], encoder.encode(jobs[i], rf, 0), 0);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    for (const auto& e : errors) {
      if (!e.empty()) throw Error(e);
    }
    double mean = 0;
    for (double q : qualities) mean += q;
    return mean / static_cast<double>(qualities.size());
  };
  const LabelResult best = search_rf(measure_all, {target, 0.05, 60});
  out.rf = best.rf_label;
  out.evaluations = best.evaluations;
  out.mean_quality = measure_all(out.rf);
  out.qualities = qualities;
  return out;
}

}  // namespace shotrf

namespace shotrf {

LabelResult label_job(const SegmentJob& job, Encoder& encoder, QualityMeter& meter, const LabelSearchConfig& cfg) {
  int probe = 0;
  return search_rf(
      [&](double rf) {
        const int pass = 1000 + probe++;
        return meter.measure(job, encoder.encode(job, rf, pass), pass);
      },
      cfg);
}

std::vector<LabelResult> label_jobs(std::span<const SegmentJob> jobs, Encoder& encoder, QualityMeter& meter,
                                    const LabelSearchConfig& cfg, std::size_t workers) {
  std::vector<LabelResult> out(jobs.size());
  std::vector<std::string> errors(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    try {
      out[i] = label_job(jobs[i], encoder, meter, cfg);
    } catch (const std::exception& e) {
      errors[i] = "segment " + std::to_string(jobs[i].index) + ": " + e.what();
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(e);
  }
  return out;
}

std::vector<LabeledExample> first_pass_examples(std::span<const SegmentJob> jobs, std::span<const double> labels) {
  if (jobs.size() != labels.size()) throw Error("first_pass_examples: label count differs from segment count");
  std::vector<LabeledExample> out;
  out.reserve(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) out.push_back({jobs[i].features, labels[i]});
  return out;
}

std::vector<LabeledExample> second_pass_examples(std::span<const SegmentJob> jobs, std::span<const double> labels,
                                                 const ModelParams& model1, Encoder& encoder, QualityMeter& meter,
                                                 std::size_t workers) {
  if (jobs.size() != labels.size()) throw Error("second_pass_examples: label count differs from segment count");
  std::vector<LabeledExample> out(jobs.size());
  std::vector<std::string> errors(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    try {
      const double rf1 = predict(model1, jobs[i].features);
      const double v1 = meter.measure(jobs[i], encoder.encode(jobs[i], rf1, 1), 1);
      out[i] = {assemble_features(jobs[i].features, std::pair{rf1, v1}), labels[i]};
    } catch (const std::exception& e) {
      errors[i] = "segment " + std::to_string(jobs[i].index) + ": " + e.what();
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(e);
  }
  return out;
}

}  // namespace shotrf
