#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lapoleaf/dataset.hpp"

namespace lapoleaf::synthetic {

/// Fully labeled classification data. `truth` mirrors `data.label` before
/// any labels are hidden.
struct LabeledSample {
  Dataset data;
  std::vector<double> truth;
};

/// Isotropic Gaussian blobs; point i belongs to class i % centers.rows().
LabeledSample gaussian_blobs(std::size_t n, const Matrix& centers, double sigma,
                             std::uint64_t seed);

/// Two blobs in the plane whose centers are `separation` sigmas apart.
LabeledSample two_blobs(std::size_t n, double separation, std::uint64_t seed);

/// Two interleaving half circles with Gaussian noise.
LabeledSample two_moons(std::size_t n, double noise, std::uint64_t seed);

/// sin(2 pi t / period) plus Gaussian noise of the given deviation.
std::vector<double> noisy_sine(std::size_t length, double period, double noise,
                               std::uint64_t seed);

/// Keeps the labels of round(fraction * N) randomly chosen rows (at least
/// one) and clears the rest. Returns the kept row indices, ascending.
std::vector<std::size_t> hide_labels(Dataset& data, double fraction, std::uint64_t seed);

}  // namespace lapoleaf::synthetic
