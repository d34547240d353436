// shotrf command-line tool. Every flag can also come from a TOML-style file
// given with --config; flags on the command line win.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error,
// 3 `run` finished with per-segment failures.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "shotrf/adapter.hpp"
#include "shotrf/controller.hpp"
#include "shotrf/textio.hpp"

using namespace shotrf;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void log(const std::string& msg) { std::cerr << "shotrf: " << msg << "\n"; }

struct Global {
  std::uint64_t seed = 20241016;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  double target_vmaf = 91.0;
  std::string workdir = "shotrf-work";
  std::string corpus;
  std::string video;
  double cut_threshold = ShotDetectorConfig{}.threshold;
  std::size_t min_shot_len = ShotDetectorConfig{}.min_shot_len;
  std::string precode = "builtin";
  std::string cache;
  std::string codec = "synthetic";
  double synthetic_noise = 0.0;
  std::string encoder_cmd;
  double encoder_timeout = 600;
  std::string meter_cmd;
  double meter_timeout = 600;
  std::string meter_parse = "last float";

  std::string path(const std::string& given, const std::string& name) const {
    return given.empty() ? (fs::path(workdir) / name).string() : given;
  }
  std::string cache_path() const { return path(cache, "features.cache"); }
};

/// Encoder and meter selected by --codec.
struct Codec {
  std::unique_ptr<Encoder> encoder_owner;
  std::unique_ptr<QualityMeter> meter_owner;
  SyntheticCodec synthetic;
  Encoder* encoder = nullptr;
  QualityMeter* meter = nullptr;

  explicit Codec(const Global& g) : synthetic(g.synthetic_noise) {
    if (g.codec == "synthetic") {
      encoder = &synthetic;
      meter = &synthetic;
      return;
    }
    if (g.codec != "external") throw ConfigError("codec must be 'synthetic' or 'external', got '" + g.codec + "'");
    AdapterSpec enc{g.encoder_cmd, std::chrono::duration<double>(g.encoder_timeout), ParseRule{}};
    AdapterSpec met{g.meter_cmd, std::chrono::duration<double>(g.meter_timeout), {}};
    try {
      met.parse_rule = ParseRule::parse(g.meter_parse);
      enc.validate(AdapterRole::Encoder);
      met.validate(AdapterRole::QualityMeter);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    const fs::path dir = fs::path(g.workdir) / "streams";
    fs::create_directories(dir);
    encoder_owner = std::make_unique<ExternalEncoder>(enc, dir);
    meter_owner = std::make_unique<ExternalQualityMeter>(met, dir);
    encoder = encoder_owner.get();
    meter = meter_owner.get();
  }
};

std::vector<SegmentInput> load_inputs(const Global& g) {
  if (g.corpus.empty() == g.video.empty()) throw ConfigError("give exactly one of --corpus or --video");
  if (!g.corpus.empty()) return inputs_from_corpus(read_corpus_file(g.corpus));
  return inputs_from_video(read_y4m_file(g.video), {g.cut_threshold, g.min_shot_len}, g.seed);
}

PrecodeSource precode_source(const Global& g) {
  try {
    return PrecodeSource::parse(g.precode);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void save_cache(const FeatureCache& cache, const std::string& path) {
  ensure_parent(path);
  cache.save_file(path);
}

/// Features for every input, through the on-disk cache.
std::vector<SegmentJob> load_jobs(const Global& g, std::span<const SegmentInput> inputs) {
  FeatureCache cache = FeatureCache::load_file(g.cache_path());
  const std::size_t before = cache.misses();
  auto jobs = prepare_jobs(inputs, cache, precode_source(g), g.workers);
  if (cache.misses() != before) save_cache(cache, g.cache_path());
  return jobs;
}

std::ofstream open_out(const std::string& path) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  return out;
}

// Training-pool split: a seeded shuffle, the first fraction for pass 1.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_pools(std::size_t n, double fraction,
                                                                          std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(mix_seed(seed, 0x5b1));
  std::shuffle(order.begin(), order.end(), rng);
  const auto cut = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (cut == 0 || cut >= n) throw ConfigError("pass-1 fraction leaves an empty training pool");
  return {{order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut)},
          {order.begin() + static_cast<std::ptrdiff_t>(cut), order.end()}};
}

void write_baseline(std::ostream& out, std::span<const SegmentJob> jobs, const BaselineResult& b) {
  out << "index,source_id,rf,quality\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    out << i << ',' << format_source_id(jobs[i].segment.source_id) << ',' << format_double(b.rf) << ','
        << format_double(b.qualities[i]) << '\n';
  }
}

std::vector<AccuracyRecord> read_baseline(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read baseline " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "index,source_id,rf,quality")
    throw ParseError(path + " line 1: unexpected header");
  std::vector<AccuracyRecord> out;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != 4) throw ParseError(path + " line " + std::to_string(n) + ": expected 4 cells");
    const double q = parse_double(cells[3], "quality");
    out.push_back({q, q, 1});
  }
  return out;
}

void write_report(const std::string& path, const AccuracyReport& r, const std::optional<AccuracyReport>& baseline) {
  auto out = open_out(path);
  write_accuracy_table(out, r, baseline);
}

struct TrainOptions {
  int pass = 1;
  std::string labels;
  std::string model1;
  std::string out;
  double pass1_fraction = 0.6;
  TrainConfig cfg;
};

int cmd_train(const Global& g, TrainOptions t) {
  if (t.pass != 1 && t.pass != 2) throw ConfigError("--pass must be 1 or 2");
  const auto inputs = load_inputs(g);
  const auto jobs = load_jobs(g, inputs);
  std::map<std::uint64_t, LabelResult> by_id;
  for (const auto& rec : read_labels_file(g.path(t.labels, "labels.csv"))) by_id[rec.source_id] = rec.result;

  auto [pool1, pool2] = split_pools(jobs.size(), t.pass1_fraction, g.seed);
  std::vector<SegmentJob> chosen;
  std::vector<double> labels;
  for (std::size_t i : t.pass == 1 ? pool1 : pool2) {
    const auto it = by_id.find(jobs[i].segment.source_id);
    if (it == by_id.end())
      throw Error("no label for segment " + std::to_string(i) + " (" + format_source_id(jobs[i].segment.source_id) +
                  "); run `label` first");
    if (!it->second.reachable) {
      log("skipping segment " + std::to_string(i) + ": target unreachable");
      continue;
    }
    chosen.push_back(jobs[i]);
    labels.push_back(it->second.rf_label);
  }
  if (chosen.empty()) throw Error("no usable labeled segments in the pass-" + std::to_string(t.pass) + " pool");

  t.cfg.seed = mix_seed(g.seed, static_cast<std::uint64_t>(t.pass));
  std::vector<LabeledExample> examples;
  if (t.pass == 1) {
    examples = first_pass_examples(chosen, labels);
  } else {
    const std::string m1_path = g.path(t.model1, "model1.bin");
    if (!fs::exists(m1_path)) throw Error("pass-2 training needs the pass-1 model; `train --pass 1` writes " + m1_path);
    const ModelParams model1 = load_model_file(m1_path, chosen.front().features.schema_version);
    Codec codec(g);
    log("encoding the pass-2 pool with the pass-1 model");
    examples = second_pass_examples(chosen, labels, model1, *codec.encoder, *codec.meter, g.workers);
    t.cfg.offset_feature = chosen.front().features.size();
  }
  log("training pass " + std::to_string(t.pass) + " on " + std::to_string(examples.size()) + " segments");
  const TrainResult r = train(examples, t.cfg);
  const std::string out = g.path(t.out, t.pass == 1 ? "model1.bin" : "model2.bin");
  ensure_parent(out);
  save_model_file(r.model, out);
  log("final loss " + format_double(r.loss_trace.back()) + ", wrote " + out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-shot two-pass RF prediction"};
  app.set_config("--config", "", "TOML config file; command-line flags override it");
  app.fallthrough();
  app.require_subcommand(1);

  Global g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--workers", g.workers, "Segment workers (also caps concurrent adapter processes)")
      ->check(CLI::PositiveNumber);
  app.add_option("--target-vmaf", g.target_vmaf, "Quality target")->capture_default_str();
  app.add_option("--workdir", g.workdir, "Directory for default artifact paths")->capture_default_str();
  app.add_option("--corpus", g.corpus, "Synthetic corpus file (input)");
  app.add_option("--video", g.video, "Y4M video (input); split into shots");
  app.add_option("--cut-threshold", g.cut_threshold, "Shot cut luma MAD threshold")->capture_default_str();
  app.add_option("--min-shot-len", g.min_shot_len, "Minimum shot length in frames")->capture_default_str();
  app.add_option("--precode", g.precode, "'builtin' or 'log:<path template>'")->capture_default_str();
  app.add_option("--cache", g.cache, "Feature cache file [workdir/features.cache]");
  app.add_option("--codec", g.codec, "'synthetic' or 'external'")->capture_default_str();
  app.add_option("--synthetic-noise", g.synthetic_noise, "Noise sigma for curves derived from features")
      ->capture_default_str();
  app.add_option("--encoder-cmd", g.encoder_cmd, "Encoder template with {input} {output} {rf}");
  app.add_option("--encoder-timeout", g.encoder_timeout, "Seconds")->capture_default_str();
  app.add_option("--meter-cmd", g.meter_cmd, "Quality meter template with {input} {reference}");
  app.add_option("--meter-timeout", g.meter_timeout, "Seconds")->capture_default_str();
  app.add_option("--meter-parse", g.meter_parse, "\"float after '<text>'\" or \"last float\"")->capture_default_str();

  // synth-corpus
  auto* synth = app.add_subcommand("synth-corpus", "Generate a synthetic corpus");
  std::size_t synth_count = 200;
  double synth_noise = 0.3;
  std::string synth_out;
  synth->add_option("--count", synth_count, "Segments")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--noise", synth_noise, "Quality noise sigma")->capture_default_str();
  synth->add_option("--out", synth_out, "[workdir/corpus.txt]");

  auto* segment = app.add_subcommand("segment", "Detect shots and list segments");
  std::string segment_out;
  segment->add_option("--out", segment_out, "[workdir/segments.csv]");

  auto* features = app.add_subcommand("features", "Extract features into the cache");
  std::string features_out;
  features->add_option("--out", features_out, "Also write a CSV table here");

  auto* label = app.add_subcommand("label", "Search the target RF of every segment");
  LabelSearchConfig label_cfg;
  std::string label_out;
  label->add_option("--tol", label_cfg.tol, "VMAF tolerance")->capture_default_str();
  label->add_option("--max-iters", label_cfg.max_iters, "Probes after the two rails")->capture_default_str();
  label->add_option("--out", label_out, "[workdir/labels.csv]");

  auto* train_cmd = app.add_subcommand("train", "Train the pass-1 or pass-2 model");
  TrainOptions topt;
  topt.cfg.epochs = 300;
  topt.cfg.weight_decay = 0.02;
  train_cmd->add_option("--pass", topt.pass, "1 or 2")->required();
  train_cmd->add_option("--labels", topt.labels, "[workdir/labels.csv]");
  train_cmd->add_option("--model1", topt.model1, "Pass-1 model for pass-2 training [workdir/model1.bin]");
  train_cmd->add_option("--out", topt.out, "[workdir/model<pass>.bin]");
  train_cmd->add_option("--pass1-fraction", topt.pass1_fraction, "Share of segments in the pass-1 pool")
      ->capture_default_str();
  train_cmd->add_option("--epochs", topt.cfg.epochs)->capture_default_str();
  train_cmd->add_option("--lr", topt.cfg.learning_rate)->capture_default_str();
  train_cmd->add_option("--batch-size", topt.cfg.batch_size)->capture_default_str();
  train_cmd->add_option("--width", topt.cfg.width)->capture_default_str();
  train_cmd->add_option("--blocks", topt.cfg.blocks)->capture_default_str();
  train_cmd->add_option("--weight-decay", topt.cfg.weight_decay)->capture_default_str();

  auto* run = app.add_subcommand("run", "Two-pass encode of every segment");
  std::string run_model1, run_model2, run_out, run_report;
  bool measure_second = false;
  run->add_option("--model1", run_model1, "[workdir/model1.bin]");
  run->add_option("--model2", run_model2, "[workdir/model2.bin]");
  run->add_option("--out", run_out, "Run records [workdir/run.csv]");
  run->add_option("--report", run_report, "Accuracy table [workdir/report.txt]");
  run->add_flag("--measure-second-pass", measure_second, "Also measure accepted second passes");

  auto* baseline = app.add_subcommand("baseline", "Single RF for the whole input");
  std::string baseline_out;
  baseline->add_option("--out", baseline_out, "[workdir/baseline.csv]");

  auto* report = app.add_subcommand("report", "Accuracy table and histogram from run records");
  std::string report_run, report_baseline, report_out, report_hist;
  report->add_option("--run", report_run, "[workdir/run.csv]");
  report->add_option("--baseline", report_baseline, "Baseline CSV to compare against");
  report->add_option("--out", report_out, "[workdir/report.txt]");
  report->add_option("--histogram", report_hist, "[workdir/histogram.csv]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    try {
      QualityTarget::around(g.target_vmaf).validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    if (synth->parsed()) {
      const auto corpus = generate_corpus(synth_count, g.seed, synth_noise);
      const auto out = g.path(synth_out, "corpus.txt");
      ensure_parent(out);
      write_corpus_file(out, corpus);
      log("wrote " + std::to_string(corpus.size()) + " segments to " + out);
      return 0;
    }
    if (segment->parsed()) {
      const auto inputs = load_inputs(g);
      auto out = open_out(g.path(segment_out, "segments.csv"));
      out << "index,start_frame,end_frame,source_id\n";
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& s = inputs[i].segment;
        out << i << ',' << s.start_frame << ',' << s.end_frame << ',' << format_source_id(s.source_id) << '\n';
      }
      log(std::to_string(inputs.size()) + " segments");
      return 0;
    }
    if (features->parsed()) {
      const auto jobs = load_jobs(g, load_inputs(g));
      if (!features_out.empty()) {
        auto out = open_out(features_out);
        out << "source_id";
        for (const auto& n : segment_feature_names(precode_source(g).schema)) out << ',' << n;
        out << '\n';
        for (const auto& j : jobs) {
          out << format_source_id(j.segment.source_id);
          for (double v : j.features.values) out << ',' << format_double(v);
          out << '\n';
        }
      }
      log("features for " + std::to_string(jobs.size()) + " segments in " + g.cache_path());
      return 0;
    }
    if (label->parsed()) {
      label_cfg.target = g.target_vmaf;
      const auto jobs = load_jobs(g, load_inputs(g));
      Codec codec(g);
      const auto results = label_jobs(jobs, *codec.encoder, *codec.meter, label_cfg, g.workers);
      std::vector<LabelRecord> records;
      std::size_t converged = 0;
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        records.push_back({jobs[i].segment.source_id, results[i]});
        converged += results[i].converged;
      }
      const auto out = g.path(label_out, "labels.csv");
      ensure_parent(out);
      write_labels_file(out, records);
      log(std::to_string(converged) + "/" + std::to_string(jobs.size()) + " labels converged, wrote " + out);
      return 0;
    }
    if (train_cmd->parsed()) return cmd_train(g, topt);
    if (run->parsed()) {
      const auto inputs = load_inputs(g);
      const std::string schema = segment_schema_version(precode_source(g).schema);
      const auto m1 = load_model_file(g.path(run_model1, "model1.bin"), schema);
      const auto m2 = load_model_file(g.path(run_model2, "model2.bin"), feedback_schema_version(schema));
      Codec codec(g);
      FeatureCache cache = FeatureCache::load_file(g.cache_path());
      PipelineConfig pc;
      pc.target = QualityTarget::around(g.target_vmaf);
      pc.measure_second_pass = measure_second;
      pc.workers = g.workers;
      pc.precode = precode_source(g);
      const RunReport r = run_pipeline(inputs, m1, m2, *codec.encoder, *codec.meter, cache, pc);
      if (r.feature_computations > 0) save_cache(cache, g.cache_path());
      {
        auto out = open_out(g.path(run_out, "run.csv"));
        write_run_records(out, r);
      }
      const auto records = accuracy_records(r);
      if (!records.empty()) write_report(g.path(run_report, "report.txt"), accuracy_report(records, g.target_vmaf), {});
      log(std::to_string(r.segments.size()) + " segments, mean passes " + format_double(r.mean_passes()) +
          ", cache hits " + std::to_string(r.cache_hits));
      if (r.failures() > 0) {
        for (const auto& s : r.segments)
          if (s.failed()) std::cerr << "segment " << s.index << ": " << s.error << "\n";
        return 3;
      }
      return 0;
    }
    if (baseline->parsed()) {
      const auto jobs = load_jobs(g, load_inputs(g));
      Codec codec(g);
      const auto b = fixed_rf_baseline(jobs, *codec.encoder, *codec.meter, g.target_vmaf, g.workers);
      auto out = open_out(g.path(baseline_out, "baseline.csv"));
      write_baseline(out, jobs, b);
      log("fixed rf " + format_double(b.rf) + ", mean quality " + format_double(b.mean_quality));
      return 0;
    }
    if (report->parsed()) {
      const std::string run_path = g.path(report_run, "run.csv");
      std::ifstream in(run_path);
      if (!in) throw Error("cannot read run records " + run_path);
      const auto r = accuracy_report(read_accuracy_records(in), g.target_vmaf);
      std::optional<AccuracyReport> base;
      if (!report_baseline.empty()) base = accuracy_report(read_baseline(report_baseline), g.target_vmaf);
      write_report(g.path(report_out, "report.txt"), r, base);
      auto hist = open_out(g.path(report_hist, "histogram.csv"));
      write_histogram(hist, r);
      write_accuracy_table(std::cout, r, base);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "shotrf: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "shotrf: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
