#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lapoleaf/core.hpp"

namespace lapoleaf {

enum class Metric { euclidean };

std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);

double distance(Metric metric, std::span<const double> a, std::span<const double> b);

/// Symmetric distance matrix stored as a packed strict lower triangle.
///
/// Row i of the triangle (distances to points 0..i-1) starts at offset
/// i*(i-1)/2, so the matrix can grow by one point without moving data.
/// `eval_count()` counts every call to the metric made on its behalf.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  std::size_t size() const noexcept { return n_; }
  std::uint64_t eval_count() const noexcept { return evals_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return 0.0;
    if (i < j) std::swap(i, j);
    return packed_[i * (i - 1) / 2 + j];
  }

  /// The M = N(N-1)/2 off-diagonal distances, each pair once.
  std::span<const double> off_diagonal() const noexcept { return packed_; }

  /// Distances from x to each of the first size() rows of `features`.
  /// Performs exactly size() metric evaluations.
  std::vector<double> measure(const Matrix& features, std::span<const double> x,
                              Metric metric);

  /// Adds a point given its distances to every existing point.
  void append(std::span<const double> to_existing);

  friend DistanceMatrix pairwise_distances(const Matrix& features, Metric metric);

 private:
  std::size_t n_ = 0;
  std::uint64_t evals_ = 0;
  std::vector<double> packed_;
};

/// Full pairwise matrix; exactly N(N-1)/2 metric evaluations.
DistanceMatrix pairwise_distances(const Matrix& features, Metric metric = Metric::euclidean);

/// Cut-off distance d_c: the value at 1-based rank ceil(percent/100 * M)
/// (clamped to [1, M]) among the M off-diagonal distances sorted ascending.
double cutoff_distance(const DistanceMatrix& dm, double percent);

/// Same rank rule over an arbitrary non-empty multiset of distances.
double cutoff_distance(std::span<const double> distances, double percent);

}  // namespace lapoleaf
