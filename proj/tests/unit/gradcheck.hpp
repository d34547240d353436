#pragma once

// Central finite differences against the analytic gradients. Shared by the
// unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "shotrf/model.hpp"

namespace testutil {

struct GradCheckResult {
  double max_rel_error = 0;
  std::size_t parameters = 0;
  bool kink = false;  // a perturbation crossed a ReLU boundary; the batch is unusable
};

inline double train_loss(const shotrf::ModelParams& m, const Eigen::MatrixXd& x, const std::vector<double>& y) {
  const Eigen::VectorXd out = shotrf::forward(m, x, shotrf::Mode::Train);
  return shotrf::mse_loss(std::span<const double>(out.data(), static_cast<std::size_t>(out.size())), y);
}

/// Signs of every ReLU input in a train-mode pass.
inline std::vector<bool> relu_pattern(const shotrf::ModelParams& m, const Eigen::MatrixXd& x) {
  const auto t = shotrf::trace_forward(m, x, shotrf::Mode::Train);
  std::vector<bool> out;
  auto add = [&](const Eigen::MatrixXd& pre) {
    for (Eigen::Index i = 0; i < pre.size(); ++i) out.push_back(pre.data()[i] > 0);
  };
  add(t.attention_pre);
  add(t.projection_pre);
  for (const auto& b : t.blocks) {
    add(b.first_pre);
    add(b.sum);
  }
  return out;
}

/// Relative error |a - n| / max(|a|, |n|), with an absolute floor of 1e-9 for
/// gradients that are numerically zero.
inline GradCheckResult check_gradients(const shotrf::ModelParams& model, const Eigen::MatrixXd& x,
                                       const std::vector<double>& y, double h = 1e-4) {
  GradCheckResult r;
  const auto analytic = shotrf::gradients(model, x, y).grads;
  std::vector<double> flat_analytic;
  analytic.for_each([&](std::span<const double> t) { flat_analytic.insert(flat_analytic.end(), t.begin(), t.end()); });

  shotrf::ModelParams m = model;
  std::vector<std::span<double>> params;
  m.weights.for_each([&](std::span<double> t) { params.push_back(t); });
  const auto base_pattern = relu_pattern(m, x);

  std::size_t k = 0;
  for (auto t : params) {
    for (double& p : t) {
      const double saved = p;
      p = saved + h;
      const double up = train_loss(m, x, y);
      r.kink = r.kink || relu_pattern(m, x) != base_pattern;
      p = saved - h;
      const double down = train_loss(m, x, y);
      r.kink = r.kink || relu_pattern(m, x) != base_pattern;
      p = saved;
      const double numeric = (up - down) / (2 * h);
      const double a = flat_analytic[k++];
      const double diff = std::abs(a - numeric);
      const double scale = std::max(std::abs(a), std::abs(numeric));
      const double rel = diff <= 1e-9 ? 0.0 : diff / scale;
      r.max_rel_error = std::max(r.max_rel_error, rel);
    }
  }
  r.parameters = k;
  return r;
}

/// A random tiny model whose biases and BN affine terms are nonzero, so every
/// parameter carries gradient.
inline shotrf::ModelParams random_model(std::size_t d, std::size_t hdim, std::size_t blocks, std::uint64_t seed) {
  auto m = shotrf::ModelParams::init(shotrf::ModelShape::for_input(d, hdim, blocks), "test", seed);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> n(0, 0.3);
  m.weights.for_each([&](std::span<double> t) {
    for (double& v : t) v += n(rng);
  });
  return m;
}

inline Eigen::MatrixXd random_batch(std::size_t d, std::size_t b, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(b));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng) * (1 + i % 3);
  return x;
}

}  // namespace testutil
