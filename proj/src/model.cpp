#include "shotrf/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

namespace shotrf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Dense zeros_like(const Dense& d) {
  return {MatrixXd::Zero(d.weight.rows(), d.weight.cols()), VectorXd::Zero(d.bias.size())};
}

Dense he_dense(std::size_t out, std::size_t in, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, scale * std::sqrt(2.0 / static_cast<double>(in)));
  Dense d{MatrixXd(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)),
          VectorXd::Zero(static_cast<Eigen::Index>(out))};
  for (Eigen::Index c = 0; c < d.weight.cols(); ++c) {
    for (Eigen::Index r = 0; r < d.weight.rows(); ++r) d.weight(r, c) = normal(rng);
  }
  return d;
}

MatrixXd affine(const Dense& d, const MatrixXd& x) { return (d.weight * x).colwise() + d.bias; }

MatrixXd relu(const MatrixXd& x) { return x.cwiseMax(0.0); }

MatrixXd relu_mask(const MatrixXd& pre) { return (pre.array() > 0.0).cast<double>().matrix(); }

void accumulate(Dense& g, const MatrixXd& delta, const MatrixXd& input) {
  g.weight.noalias() += delta * input.transpose();
  g.bias += delta.rowwise().sum();
}

}  // namespace

Weights Weights::zeros_like() const {
  Weights z;
  z.bn_gamma = VectorXd::Zero(bn_gamma.size());
  z.bn_beta = VectorXd::Zero(bn_beta.size());
  z.attention_in = shotrf::zeros_like(attention_in);
  z.attention_out = shotrf::zeros_like(attention_out);
  z.projection = shotrf::zeros_like(projection);
  for (const auto& b : blocks) z.blocks.push_back({shotrf::zeros_like(b.first), shotrf::zeros_like(b.second)});
  z.head = shotrf::zeros_like(head);
  return z;
}

std::size_t Weights::parameter_count() const {
  std::size_t n = 0;
  for_each([&](std::span<const double> t) { n += t.size(); });
  return n;
}

ModelShape ModelShape::for_input(std::size_t input_dim, std::size_t width, std::size_t blocks) {
  return {input_dim, std::max<std::size_t>(1, input_dim / 4), width, blocks};
}

ModelParams ModelParams::init(const ModelShape& shape, std::string schema_version, std::uint64_t seed) {
  if (shape.input_dim == 0 || shape.attention_dim == 0 || shape.width == 0) {
    throw Error("model shape dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  const auto d = static_cast<Eigen::Index>(shape.input_dim);
  ModelParams m;
  m.schema_version = std::move(schema_version);
  m.weights.bn_gamma = VectorXd::Ones(d);
  m.weights.bn_beta = VectorXd::Zero(d);
  m.weights.attention_in = he_dense(shape.attention_dim, shape.input_dim, 1.0, rng);
  m.weights.attention_out = he_dense(shape.input_dim, shape.attention_dim, 0.5, rng);
  m.weights.projection = he_dense(shape.width, shape.input_dim, 1.0, rng);
  for (std::size_t b = 0; b < shape.blocks; ++b) {
    ResidualBlock block;
    block.first = he_dense(shape.width, shape.width, 1.0, rng);
    block.second = he_dense(shape.width, shape.width, 0.5, rng);
    m.weights.blocks.push_back(std::move(block));
  }
  m.weights.head = he_dense(1, shape.width, 0.5, rng);
  m.running_mean = VectorXd::Zero(d);
  m.running_var = VectorXd::Ones(d);
  return m;
}

ModelShape ModelParams::shape() const {
  return {static_cast<std::size_t>(weights.bn_gamma.size()), static_cast<std::size_t>(weights.attention_in.bias.size()),
          static_cast<std::size_t>(weights.projection.bias.size()), weights.blocks.size()};
}

void ModelParams::validate() const {
  const ModelShape s = shape();
  const auto d = static_cast<Eigen::Index>(s.input_dim);
  const auto a = static_cast<Eigen::Index>(s.attention_dim);
  const auto h = static_cast<Eigen::Index>(s.width);
  auto check = [](bool ok, const char* what) {
    if (!ok) throw ModelFormatError(std::string("inconsistent model shape: ") + what);
  };
  check(d > 0 && a > 0 && h > 0, "empty dimension");
  check(weights.bn_beta.size() == d && running_mean.size() == d && running_var.size() == d, "batch norm");
  auto dense_ok = [](const Dense& l, Eigen::Index out, Eigen::Index in) {
    return l.weight.rows() == out && l.weight.cols() == in && l.bias.size() == out;
  };
  check(dense_ok(weights.attention_in, a, d), "attention_in");
  check(dense_ok(weights.attention_out, d, a), "attention_out");
  check(dense_ok(weights.projection, h, d), "projection");
  for (const auto& b : weights.blocks) check(dense_ok(b.first, h, h) && dense_ok(b.second, h, h), "residual block");
  check(dense_ok(weights.head, 1, h), "head");

  bool finite = running_mean.allFinite() && running_var.allFinite();
  weights.for_each([&](std::span<const double> t) {
    finite = finite && std::all_of(t.begin(), t.end(), [](double v) { return std::isfinite(v); });
  });
  if (!finite) throw ModelFormatError("model tensors must be finite");
  if ((running_var.array() <= 0.0).any()) throw ModelFormatError("running variance must be positive");
  if (offset_feature && *offset_feature >= s.input_dim) throw ModelFormatError("offset feature out of range");
}

ForwardTrace trace_forward(const ModelParams& m, const MatrixXd& batch, Mode mode) {
  const auto& w = m.weights;
  if (batch.rows() != w.bn_gamma.size()) {
    throw DimensionError("model expects " + std::to_string(w.bn_gamma.size()) + " features, got " +
                         std::to_string(batch.rows()));
  }
  if (batch.cols() == 0) throw DimensionError("forward: empty batch");
  if (!batch.allFinite()) throw Error("forward: non-finite input feature");

  ForwardTrace t;
  t.input = batch;
  if (mode == Mode::Train) {
    t.batch_mean = batch.rowwise().mean();
    const MatrixXd centered = batch.colwise() - t.batch_mean;
    t.batch_var = centered.array().square().rowwise().mean();
  } else {
    t.batch_mean = m.running_mean;
    t.batch_var = m.running_var;
  }
  const VectorXd inv_std = (t.batch_var.array() + m.bn_eps).rsqrt();
  t.normalized = (batch.colwise() - t.batch_mean).array().colwise() * inv_std.array();
  t.bn_out = (t.normalized.array().colwise() * w.bn_gamma.array()).colwise() + w.bn_beta.array();

  t.attention_pre = affine(w.attention_in, t.bn_out);
  t.attention_hidden = relu(t.attention_pre);
  const MatrixXd mask_pre = affine(w.attention_out, t.attention_hidden);
  t.mask = (1.0 / (1.0 + (-mask_pre.array()).exp())).matrix();
  t.gated = t.bn_out.cwiseProduct(t.mask);

  t.projection_pre = affine(w.projection, t.gated);
  t.projection_out = relu(t.projection_pre);
  const MatrixXd* h = &t.projection_out;
  t.blocks.resize(w.blocks.size());
  for (std::size_t i = 0; i < w.blocks.size(); ++i) {
    auto& b = t.blocks[i];
    b.first_pre = affine(w.blocks[i].first, *h);
    b.first_out = relu(b.first_pre);
    b.sum = *h + affine(w.blocks[i].second, b.first_out);
    b.out = relu(b.sum);
    h = &b.out;
  }
  t.output = affine(w.head, *h).row(0);
  if (m.offset_feature) t.output += batch.row(static_cast<Eigen::Index>(*m.offset_feature));
  return t;
}

Eigen::VectorXd forward(const ModelParams& m, const MatrixXd& batch, Mode mode) {
  if (mode == Mode::Train) return trace_forward(m, batch, mode).output.transpose();
  VectorXd out(batch.cols());
  for (Eigen::Index c = 0; c < batch.cols(); ++c) {
    const MatrixXd column = batch.col(c);
    out(c) = std::clamp(trace_forward(m, column, Mode::Infer).output(0), kRfMin, kRfMax);
  }
  return out;
}

double predict(const ModelParams& m, std::span<const double> x) {
  const MatrixXd column = Eigen::Map<const VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  return forward(m, column, Mode::Infer)(0);
}

double predict(const ModelParams& m, const FeatureVector& x) {
  if (x.schema_version != m.schema_version) {
    throw IncompatibleModel("model expects features '" + m.schema_version + "', got '" + x.schema_version + "'");
  }
  return predict(m, std::span<const double>(x.values));
}

double mse_loss(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.empty()) throw Error("mse_loss: empty input");
  if (predictions.size() != labels.size()) throw DimensionError("mse_loss: length mismatch");
  double sum = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - labels[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

BatchGradients gradients(const ModelParams& m, const MatrixXd& batch, std::span<const double> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != batch.cols()) throw DimensionError("gradients: label count mismatch");
  const auto& w = m.weights;
  BatchGradients out;
  out.trace = trace_forward(m, batch, Mode::Train);
  const ForwardTrace& t = out.trace;
  out.grads = w.zeros_like();
  Weights& g = out.grads;

  const auto n = static_cast<double>(batch.cols());
  const Eigen::Map<const Eigen::RowVectorXd> y(labels.data(), static_cast<Eigen::Index>(labels.size()));
  const Eigen::RowVectorXd residual = t.output - y;
  out.loss = residual.squaredNorm() / n;

  MatrixXd delta = 2.0 / n * residual;  // dL/d(output), 1 x B
  const MatrixXd& top = w.blocks.empty() ? t.projection_out : t.blocks.back().out;
  accumulate(g.head, delta, top);
  MatrixXd dh = w.head.weight.transpose() * delta;

  for (std::size_t i = w.blocks.size(); i-- > 0;) {
    const auto& b = t.blocks[i];
    const MatrixXd& block_in = i == 0 ? t.projection_out : t.blocks[i - 1].out;
    const MatrixXd dsum = dh.cwiseProduct(relu_mask(b.sum));
    accumulate(g.blocks[i].second, dsum, b.first_out);
    const MatrixXd dfirst = (w.blocks[i].second.weight.transpose() * dsum).cwiseProduct(relu_mask(b.first_pre));
    accumulate(g.blocks[i].first, dfirst, block_in);
    dh = dsum + w.blocks[i].first.weight.transpose() * dfirst;
  }

  const MatrixXd dproj = dh.cwiseProduct(relu_mask(t.projection_pre));
  accumulate(g.projection, dproj, t.gated);
  const MatrixXd dgated = w.projection.weight.transpose() * dproj;

  MatrixXd dbn = dgated.cwiseProduct(t.mask);
  const MatrixXd dmask_pre =
      dgated.cwiseProduct(t.bn_out).array() * t.mask.array() * (1.0 - t.mask.array());
  accumulate(g.attention_out, dmask_pre, t.attention_hidden);
  const MatrixXd datt =
      (w.attention_out.weight.transpose() * dmask_pre).cwiseProduct(relu_mask(t.attention_pre));
  accumulate(g.attention_in, datt, t.bn_out);
  dbn += w.attention_in.weight.transpose() * datt;

  g.bn_gamma = dbn.cwiseProduct(t.normalized).rowwise().sum();
  g.bn_beta = dbn.rowwise().sum();
  return out;
}

namespace {

MatrixXd gather(std::span<const LabeledExample> data, std::span<const std::size_t> idx, std::vector<double>& labels) {
  const auto d = static_cast<Eigen::Index>(data.front().features.size());
  MatrixXd x(d, static_cast<Eigen::Index>(idx.size()));
  labels.resize(idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) {
    const auto& ex = data[idx[c]];
    x.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const VectorXd>(ex.features.values.data(), d);
    labels[c] = ex.rf_label;
  }
  return x;
}

void add_weight_decay(Weights& g, const Weights& w, double decay) {
  auto dense = [&](Dense& gd, const Dense& wd) { gd.weight += decay * wd.weight; };
  dense(g.attention_in, w.attention_in);
  dense(g.attention_out, w.attention_out);
  dense(g.projection, w.projection);
  for (std::size_t i = 0; i < w.blocks.size(); ++i) {
    dense(g.blocks[i].first, w.blocks[i].first);
    dense(g.blocks[i].second, w.blocks[i].second);
  }
  dense(g.head, w.head);
}

}  // namespace

TrainResult train(std::span<const LabeledExample> dataset, const TrainConfig& cfg) {
  if (dataset.empty()) throw Error("train: empty dataset");
  if (!(cfg.learning_rate > 0)) throw Error("train: learning_rate must be positive");
  if (cfg.batch_size < 1) throw Error("train: batch_size must be at least 1");
  const std::size_t dim = dataset.front().features.size();
  const std::string& schema = dataset.front().features.schema_version;
  for (const auto& ex : dataset) {
    if (ex.features.size() != dim || ex.features.schema_version != schema) {
      throw DimensionError("train: all examples must share one feature schema and dimension");
    }
  }

  TrainResult result;
  ModelParams& m = result.model;
  m = ModelParams::init(ModelShape::for_input(dim, cfg.width, cfg.blocks), schema, cfg.seed);
  m.bn_eps = cfg.bn_eps;

  if (cfg.offset_feature && *cfg.offset_feature >= dim) throw Error("train: offset feature out of range");
  m.offset_feature = cfg.offset_feature;

  // Start the head at the mean target; the trunk then only has to learn deviations.
  double target_mean = 0;
  for (const auto& ex : dataset) {
    target_mean += ex.rf_label - (cfg.offset_feature ? ex.features.values[*cfg.offset_feature] : 0.0);
  }
  m.weights.head.bias(0) = target_mean / static_cast<double>(dataset.size());

  // Running statistics start from the full-dataset moments.
  {
    std::vector<std::size_t> all(dataset.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<double> labels;
    const MatrixXd x = gather(dataset, all, labels);
    m.running_mean = x.rowwise().mean();
    m.running_var = (x.colwise() - m.running_mean).array().square().rowwise().mean();
    m.running_var = m.running_var.cwiseMax(cfg.bn_eps);
  }

  Weights first_moment = m.weights.zeros_like();
  Weights second_moment = m.weights.zeros_like();
  std::vector<std::span<double>> params, m1, m2;
  m.weights.for_each([&](std::span<double> s) { params.push_back(s); });
  first_moment.for_each([&](std::span<double> s) { m1.push_back(s); });
  second_moment.for_each([&](std::span<double> s) { m2.push_back(s); });

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> labels;
  std::uint64_t step = 0;

  // Batch boundaries; a trailing single example has no batch variance, so it joins the previous batch.
  std::vector<std::pair<std::size_t, std::size_t>> batches;
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    batches.emplace_back(start, std::min(order.size(), start + cfg.batch_size));
  }
  if (batches.size() > 1 && batches.back().second - batches.back().first == 1) {
    batches.pop_back();
    batches.back().second = order.size();
  }

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0;
    for (const auto& [start, end] : batches) {
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const MatrixXd x = gather(dataset, idx, labels);
      BatchGradients bg = gradients(m, x, labels);
      if (!std::isfinite(bg.loss)) {
        throw TrainingError("training diverged at epoch " + std::to_string(epoch), epoch);
      }
      epoch_loss += bg.loss * static_cast<double>(idx.size());

      if (idx.size() > 1) {
        const double unbias = static_cast<double>(idx.size()) / static_cast<double>(idx.size() - 1);
        m.running_mean = (1.0 - cfg.bn_momentum) * m.running_mean + cfg.bn_momentum * bg.trace.batch_mean;
        m.running_var = (1.0 - cfg.bn_momentum) * m.running_var + cfg.bn_momentum * unbias * bg.trace.batch_var;
        m.running_var = m.running_var.cwiseMax(cfg.bn_eps);
      }

      if (cfg.weight_decay > 0) add_weight_decay(bg.grads, m.weights, cfg.weight_decay);

      ++step;
      const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
      std::size_t k = 0;
      bg.grads.for_each([&](std::span<const double> grad) {
        auto p = params[k];
        auto a = m1[k];
        auto v = m2[k];
        for (std::size_t i = 0; i < grad.size(); ++i) {
          a[i] = cfg.adam_beta1 * a[i] + (1.0 - cfg.adam_beta1) * grad[i];
          v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
          p[i] -= cfg.learning_rate * (a[i] / c1) / (std::sqrt(v[i] / c2) + cfg.adam_eps);
        }
        ++k;
      });
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) throw TrainingError("training diverged at epoch " + std::to_string(epoch), epoch);
    result.loss_trace.push_back(epoch_loss);
  }
  m.validate();
  return result;
}

namespace {

constexpr char kMagic[8] = {'S', 'H', 'O', 'T', 'R', 'F', 'N', 'N'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint64_t kMaxDim = 1u << 20;

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_dense(std::ostream& out, const Dense& d) {
  for (Eigen::Index r = 0; r < d.weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < d.weight.cols(); ++c) put_f64(out, d.weight(r, c));
  }
  for (Eigen::Index r = 0; r < d.bias.size(); ++r) put_f64(out, d.bias(r));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint64_t uint(int bytes) {
    unsigned char buf[8];
    in_.read(reinterpret_cast<char*>(buf), bytes);
    if (in_.gcount() != bytes) throw ModelFormatError("truncated model file");
    std::uint64_t v = 0;
    for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  }
  double f64() { return std::bit_cast<double>(uint(8)); }
  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw ModelFormatError("truncated model file");
    return s;
  }
  VectorXd vec(Eigen::Index n) {
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = f64();
    return v;
  }
  Dense dense(Eigen::Index out, Eigen::Index in) {
    Dense d{MatrixXd(out, in), VectorXd()};
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) d.weight(r, c) = f64();
    }
    d.bias = vec(out);
    return d;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

}  // namespace

void save_model(const ModelParams& m, std::ostream& out) {
  m.validate();
  const ModelShape s = m.shape();
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(m.schema_version.size()));
  out.write(m.schema_version.data(), static_cast<std::streamsize>(m.schema_version.size()));
  put_u64(out, s.input_dim);
  put_u64(out, s.attention_dim);
  put_u64(out, s.width);
  put_u64(out, s.blocks);
  put_f64(out, m.bn_eps);
  put_u64(out, m.offset_feature ? static_cast<std::uint64_t>(*m.offset_feature) : ~std::uint64_t{0});
  for (const VectorXd* v : {&m.weights.bn_gamma, &m.weights.bn_beta, &m.running_mean, &m.running_var}) {
    for (Eigen::Index i = 0; i < v->size(); ++i) put_f64(out, (*v)(i));
  }
  put_dense(out, m.weights.attention_in);
  put_dense(out, m.weights.attention_out);
  put_dense(out, m.weights.projection);
  for (const auto& b : m.weights.blocks) {
    put_dense(out, b.first);
    put_dense(out, b.second);
  }
  put_dense(out, m.weights.head);
  if (!out) throw Error("failed to write model");
}

void save_model_file(const ModelParams& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model " + path);
  save_model(m, out);
}

ModelParams load_model(std::istream& in, const std::optional<std::string>& expected_schema) {
  Reader r(in);
  if (r.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) throw ModelFormatError("bad magic");
  if (const auto version = r.uint(4); version != kFormatVersion) {
    throw ModelFormatError("unsupported model format version " + std::to_string(version));
  }
  const auto schema_len = r.uint(4);
  if (schema_len > 4096) throw ModelFormatError("schema version string too long");
  ModelParams m;
  m.schema_version = r.bytes(schema_len);
  if (expected_schema && *expected_schema != m.schema_version) {
    throw IncompatibleModel("model was trained on features '" + m.schema_version + "' but the pipeline produces '" +
                            *expected_schema + "'");
  }
  ModelShape s;
  s.input_dim = r.uint(8);
  s.attention_dim = r.uint(8);
  s.width = r.uint(8);
  s.blocks = r.uint(8);
  for (auto v : {s.input_dim, s.attention_dim, s.width}) {
    if (v == 0 || v > kMaxDim) throw ModelFormatError("shape inconsistency: dimension out of range");
  }
  if (s.blocks > 1024) throw ModelFormatError("shape inconsistency: too many residual blocks");
  m.bn_eps = r.f64();
  if (const auto offset = r.uint(8); offset != ~std::uint64_t{0}) {
    if (offset >= s.input_dim) throw ModelFormatError("shape inconsistency: offset feature out of range");
    m.offset_feature = static_cast<std::size_t>(offset);
  }

  const auto d = static_cast<Eigen::Index>(s.input_dim);
  const auto a = static_cast<Eigen::Index>(s.attention_dim);
  const auto h = static_cast<Eigen::Index>(s.width);
  m.weights.bn_gamma = r.vec(d);
  m.weights.bn_beta = r.vec(d);
  m.running_mean = r.vec(d);
  m.running_var = r.vec(d);
  m.weights.attention_in = r.dense(a, d);
  m.weights.attention_out = r.dense(d, a);
  m.weights.projection = r.dense(h, d);
  for (std::size_t i = 0; i < s.blocks; ++i) {
    ResidualBlock b;
    b.first = r.dense(h, h);
    b.second = r.dense(h, h);
    m.weights.blocks.push_back(std::move(b));
  }
  m.weights.head = r.dense(1, h);
  if (!r.at_end()) throw ModelFormatError("trailing bytes after model tensors");
  m.validate();
  return m;
}

ModelParams load_model_file(const std::string& path, const std::optional<std::string>& expected_schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model " + path);
  return load_model(in, expected_schema);
}

}  // namespace shotrf
