#include <doctest.h>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "gradcheck.hpp"
#include "helpers.hpp"
#include "shotrf/controller.hpp"
#include "shotrf/error.hpp"

using namespace shotrf;

namespace {

/// Encoder and meter that replay scripted qualities per pass and log calls.
class ScriptedCodec final : public Encoder, public QualityMeter {
 public:
  std::map<int, double> quality_by_pass;
  std::vector<std::pair<int, double>> encodes;
  std::vector<int> measures;
  int fail_on_pass = -1;

  StreamRef encode(const SegmentJob& job, double rf, int pass) override {
    if (pass == fail_on_pass) throw Error("encoder exploded");
    encodes.emplace_back(pass, rf);
    return {"s" + std::to_string(job.index) + "p" + std::to_string(pass), rf};
  }
  double measure(const SegmentJob&, const StreamRef&, int pass) override {
    measures.push_back(pass);
    return quality_by_pass.at(pass);
  }
};

SegmentJob job_with(std::size_t dim, double fill = 1.0) {
  SegmentJob job;
  job.features = {"base", std::vector<double>(dim, fill)};
  return job;
}

Predictor constant(double rf) {
  return [rf](const FeatureVector&) { return rf; };
}

}  // namespace

TEST_CASE("assemble_features") {
  const FeatureVector base{"base", std::vector<double>(130, 0.5)};
  CHECK(assemble_features(base, std::nullopt) == base);
  const auto with = assemble_features(base, std::pair{23.5, 88.0});
  REQUIRE(with.size() == 132);
  CHECK(with.values[130] == 23.5);
  CHECK(with.values[131] == 88.0);
  CHECK(with.schema_version == feedback_schema_version("base"));
  CHECK(assemble_features(base, std::pair{88.0, 23.5}) != with);
}

TEST_CASE("quality target") {
  const auto qt = QualityTarget::around(91);
  CHECK(qt.window_low == 90);
  CHECK(qt.window_high == 92);
  CHECK(qt.accepts(90.0));
  CHECK(qt.accepts(92.0));
  CHECK_FALSE(qt.accepts(89.999));
  CHECK_THROWS((QualityTarget{91, 92, 93}.validate()));
}

TEST_CASE("in-window first pass is accepted") {
  ScriptedCodec codec;
  codec.quality_by_pass = {{1, 91.5}};
  const auto r = encode_segment_two_pass(job_with(4), constant(25), constant(30), codec, codec, {}, true);
  CHECK(r.total_passes == 1);
  CHECK(r.passes.size() == 1);
  CHECK(r.accepted_stream.handle == "s0p1");
  CHECK(r.passes[0].measured_quality == 91.5);
}

TEST_CASE("out-of-window first pass triggers an unconditionally accepted second pass") {
  ScriptedCodec codec;
  codec.quality_by_pass = {{1, 88.0}, {2, 70.0}};
  FeatureVector seen;
  const auto r = encode_segment_two_pass(
      job_with(4), constant(25),
      [&](const FeatureVector& x) {
        seen = x;
        return 22.0;
      },
      codec, codec, {}, false);
  CHECK(r.total_passes == 2);
  CHECK(r.accepted_stream.handle == "s0p2");
  CHECK_FALSE(r.passes[1].measured_quality.has_value());
  CHECK(codec.measures == std::vector<int>{1});
  CHECK(seen.values == std::vector<double>{1, 1, 1, 1, 25, 88});

  ScriptedCodec eval;
  eval.quality_by_pass = {{1, 95.0}, {2, 70.0}};
  const auto e = encode_segment_two_pass(job_with(4), constant(25), constant(30), eval, eval, {}, true);
  CHECK(e.passes[1].measured_quality == 70.0);  // measured but still accepted
  CHECK(e.accepted_stream.handle == "s0p2");
}

TEST_CASE("predictions are clamped to the RF range") {
  ScriptedCodec codec;
  codec.quality_by_pass = {{1, 91.0}};
  const auto r = encode_segment_two_pass(job_with(2), constant(80), constant(0), codec, codec, {}, false);
  CHECK(r.passes[0].rf == 51.0);
}

TEST_CASE("perfect second-pass predictor hits the target on the oracle") {
  const SyntheticCurveParams curve{27.0, 0.22, 100.0, 0.0};
  SegmentJob job = job_with(3);
  job.curve = curve;
  SyntheticCodec codec;
  const auto r = encode_segment_two_pass(
      job, constant(10), [&](const FeatureVector&) { return synth_label(curve, 91.0); }, codec, codec, {}, true);
  REQUIRE(r.total_passes == 2);
  CHECK(std::abs(*r.passes[1].measured_quality - 91.0) < 1e-6);
}

TEST_CASE("encoder failures become segment errors with the pass index") {
  ScriptedCodec codec;
  codec.quality_by_pass = {{1, 80.0}};
  codec.fail_on_pass = 2;
  try {
    encode_segment_two_pass(job_with(2), constant(20), constant(10), codec, codec, {}, false);
    FAIL("expected a segment error");
  } catch (const SegmentError& e) {
    CHECK(e.pass_index() == 2);
    CHECK(std::string(e.what()).find("encoder exploded") != std::string::npos);
  }
}

TEST_CASE("two-pass trigger property over random qualities") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> v(80, 100);
  for (int trial = 0; trial < 500; ++trial) {
    ScriptedCodec codec;
    const double v1 = trial % 50 == 0 ? (trial % 100 == 0 ? 90.0 : 92.0) : v(rng);
    codec.quality_by_pass = {{1, v1}, {2, v(rng)}};
    const auto r = encode_segment_two_pass(job_with(3), constant(20), constant(21), codec, codec, {}, true);
    const bool outside = v1 < 90 || v1 > 92;
    CHECK(r.total_passes == (outside ? 2 : 1));
    CHECK(r.passes.size() == static_cast<std::size_t>(r.total_passes));
    CHECK(r.accepted_stream == r.passes.back().stream);
  }
}

namespace {

struct Fixture {
  ModelParams model1;
  ModelParams model2;
  std::vector<SegmentInput> inputs;

  explicit Fixture(std::size_t count) {
    const auto corpus = generate_corpus(count, 31, 0.3);
    inputs = inputs_from_corpus(corpus);
    const std::string schema = segment_schema_version(builtin_schema());
    model1 = testutil::random_model(130, 8, 1, 1);
    model1.schema_version = schema;
    model1.weights.head.bias(0) = 20;
    model2 = testutil::random_model(132, 8, 1, 2);
    model2.schema_version = feedback_schema_version(schema);
    model2.weights.head.bias(0) = 20;
  }
};

std::string records(const RunReport& r) {
  std::ostringstream out;
  write_run_records(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("pipeline: deterministic, index ordered, cache aware") {
  Fixture fx(12);
  SyntheticCodec codec;
  FeatureCache cache;
  PipelineConfig cfg;
  cfg.workers = 3;
  cfg.measure_second_pass = true;
  const RunReport cold = run_pipeline(fx.inputs, fx.model1, fx.model2, codec, codec, cache, cfg);
  CHECK(cold.feature_computations == 12);
  CHECK(cold.cache_hits == 0);
  CHECK(cold.failures() == 0);
  for (std::size_t i = 0; i < cold.segments.size(); ++i) CHECK(cold.segments[i].index == i);

  const RunReport warm = run_pipeline(fx.inputs, fx.model1, fx.model2, codec, codec, cache, cfg);
  CHECK(warm.feature_computations == 0);
  CHECK(warm.cache_hits == 12);
  CHECK(records(warm) == records(cold));

  cfg.workers = 1;
  FeatureCache fresh;
  CHECK(records(run_pipeline(fx.inputs, fx.model1, fx.model2, codec, codec, fresh, cfg)) == records(cold));
}

TEST_CASE("pipeline: a single-shot video yields one result") {
  std::mt19937_64 rng(3);
  const FrameSequence video = testutil::random_sequence(rng, 32, 32, 4);
  const auto inputs = inputs_from_video(video, {1000.0, 25}, 9);
  REQUIRE(inputs.size() == 1);
  Fixture fx(1);
  SyntheticCodec codec(0.3);
  FeatureCache cache;
  const auto report = run_pipeline(inputs, fx.model1, fx.model2, codec, codec, cache, {});
  CHECK(report.segments.size() == 1);
  CHECK(report.failures() == 0);
}

TEST_CASE("pipeline: segment failures are recorded and the run continues") {
  class Flaky final : public Encoder, public QualityMeter {
   public:
    StreamRef encode(const SegmentJob& job, double rf, int) override {
      if (job.index == 1) throw Error("boom");
      return {"ok", rf};
    }
    double measure(const SegmentJob&, const StreamRef&, int) override { return 91.0; }
  } flaky;
  Fixture fx(3);
  FeatureCache cache;
  const auto report = run_pipeline(fx.inputs, fx.model1, fx.model2, flaky, flaky, cache, {});
  CHECK(report.failures() == 1);
  CHECK(report.segments[1].failed());
  CHECK(report.segments[1].error.find("pass 1") != std::string::npos);
  CHECK_FALSE(report.segments[0].failed());
  CHECK_FALSE(report.segments[2].failed());
  CHECK(report.mean_passes() == 1.0);
  const auto recs = accuracy_records(report);
  CHECK(recs.size() == 2);
}

TEST_CASE("accuracy report arithmetic") {
  const std::vector<AccuracyRecord> three{{90.5, 90.5, 1}, {91.3, 91.3, 1}, {93.2, 93.2, 1}};
  const auto r = accuracy_report(three, 91.0);
  CHECK(r.pass1_percent[0] == doctest::Approx(200.0 / 3.0));
  CHECK(r.final_percent[0] == doctest::Approx(200.0 / 3.0));
  CHECK(r.pass1_percent[2] == 100.0);

  std::vector<AccuracyRecord> exact(10, {91.0, 91.0, 1});
  const auto e = accuracy_report(exact, 91.0);
  for (double p : e.final_percent) CHECK(p == 100.0);
  CHECK(e.mean_passes == 1.0);
  CHECK_THROWS(accuracy_report(std::vector<AccuracyRecord>{}, 91.0));

  // Histogram bins cover every record once.
  std::size_t p1 = 0, fin = 0;
  for (const auto& b : r.histogram) {
    p1 += b.pass1;
    fin += b.final;
  }
  CHECK(p1 == 3);
  CHECK(fin == 3);
}

TEST_CASE("run records round-trip into accuracy records") {
  Fixture fx(6);
  SyntheticCodec codec;
  FeatureCache cache;
  PipelineConfig cfg;
  cfg.measure_second_pass = true;
  const auto report = run_pipeline(fx.inputs, fx.model1, fx.model2, codec, codec, cache, cfg);
  std::stringstream buf;
  write_run_records(buf, report);
  const auto parsed = read_accuracy_records(buf);
  const auto direct = accuracy_records(report);
  REQUIRE(parsed.size() == direct.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].pass1_quality == direct[i].pass1_quality);
    CHECK(parsed[i].final_quality == direct[i].final_quality);
    CHECK(parsed[i].passes == direct[i].passes);
  }
}

TEST_CASE("fixed-RF baseline") {
  SUBCASE("identical curves reproduce per-segment labeling") {
    const SyntheticCurveParams curve{28.0, 0.27, 100.0, 0.0};
    std::vector<SegmentJob> jobs(5);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      jobs[i].index = i;
      jobs[i].curve = curve;
    }
    SyntheticCodec codec;
    const auto b = fixed_rf_baseline(jobs, codec, codec, 91.0);
    CHECK(std::abs(b.rf - synth_label(curve, 91.0)) < 0.05);
    std::vector<AccuracyRecord> recs;
    for (double q : b.qualities) recs.push_back({q, q, 1});
    CHECK(accuracy_report(recs, 91.0).pass1_percent[0] == 100.0);
  }
  SUBCASE("mean quality is on target for a mixed corpus") {
    const auto corpus = generate_corpus(40, 8, 0.0);
    std::vector<SegmentJob> jobs(corpus.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) jobs[i].curve = corpus[i].curve;
    SyntheticCodec codec;
    const auto b = fixed_rf_baseline(jobs, codec, codec, 91.0);
    CHECK(std::abs(b.mean_quality - 91.0) <= 0.1);
    CHECK(b.qualities.size() == 40);
  }
}

TEST_CASE("labeling helpers use the synthetic codec") {
  const auto corpus = generate_corpus(8, 4, 0.0);
  std::vector<SegmentJob> jobs(corpus.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    jobs[i].curve = corpus[i].curve;
    jobs[i].features = {"base", {static_cast<double>(i)}};
  }
  SyntheticCodec codec;
  const auto labels = label_jobs(jobs, codec, codec, {91.0, 0.01, 30}, 2);
  std::vector<double> y;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    CHECK(labels[i].converged);
    CHECK(std::abs(labels[i].rf_label - synth_label(corpus[i].curve, 91.0)) < 0.01);
    y.push_back(labels[i].rf_label);
  }
  const auto first = first_pass_examples(jobs, y);
  CHECK(first[3].features == jobs[3].features);
  auto model = testutil::random_model(1, 4, 1, 3);
  model.schema_version = "base";
  const auto second = second_pass_examples(jobs, y, model, codec, codec);
  CHECK(second[2].features.size() == 3);
  CHECK(second[2].features.values[1] == predict(model, jobs[2].features));
  CHECK(second[2].rf_label == y[2]);
}
