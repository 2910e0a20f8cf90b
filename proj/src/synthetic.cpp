#include "lapoleaf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace lapoleaf::synthetic {

LabeledSample gaussian_blobs(std::size_t n, const Matrix& centers, double sigma,
                             std::uint64_t seed) {
  if (centers.rows() == 0) throw ValidationError("need at least one center");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  LabeledSample out;
  out.data.mode = TaskMode::classification;
  for (std::size_t c = 0; c < centers.rows(); ++c) out.data.class_names.push_back(std::to_string(c));
  std::vector<double> x(centers.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % centers.rows();
    for (std::size_t d = 0; d < x.size(); ++d) x[d] = centers(c, d) + noise(rng);
    out.data.append(x, 1, static_cast<double>(c));
    out.truth.push_back(static_cast<double>(c));
  }
  return out;
}

LabeledSample two_blobs(std::size_t n, double separation, std::uint64_t seed) {
  Matrix centers(2, 2);
  centers(1, 0) = separation;
  return gaussian_blobs(n, centers, 1.0, seed);
}

LabeledSample two_moons(std::size_t n, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::normal_distribution<double> jitter(0.0, noise);
  LabeledSample out;
  out.data.mode = TaskMode::classification;
  out.data.class_names = {"0", "1"};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % 2;
    const double t = angle(rng);
    double x = std::cos(t), y = std::sin(t);
    if (c == 1) {
      x = 1.0 - x;
      y = 0.5 - y;
    }
    const double p[2] = {x + jitter(rng), y + jitter(rng)};
    out.data.append(p, 1, static_cast<double>(c));
    out.truth.push_back(static_cast<double>(c));
  }
  return out;
}

std::vector<double> noisy_sine(std::size_t length, double period, double noise,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, noise);
  std::vector<double> out(length);
  for (std::size_t t = 0; t < length; ++t) {
    out[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period) + jitter(rng);
  }
  return out;
}

std::vector<std::size_t> hide_labels(Dataset& data, double fraction, std::uint64_t seed) {
  const std::size_t n = data.size();
  auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  keep = std::clamp<std::size_t>(keep, 1, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  std::vector<std::uint8_t> kept(n, 0);
  for (std::size_t i : idx) kept[i] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (!kept[i]) data.label[i].reset();
  }
  return idx;
}

}  // namespace lapoleaf::synthetic
