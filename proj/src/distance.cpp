#include "lapoleaf/distance.hpp"

#include <algorithm>
#include <cmath>

namespace lapoleaf {

std::string to_string(Metric) { return "euclidean"; }

Metric metric_from_string(const std::string& name) {
  if (name == "euclidean") return Metric::euclidean;
  throw ValidationError("unknown metric '" + name + "'");
}

double distance(Metric, std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

std::vector<double> DistanceMatrix::measure(const Matrix& features, std::span<const double> x,
                                            Metric metric) {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = distance(metric, features.row(j), x);
  evals_ += n_;
  return out;
}

void DistanceMatrix::append(std::span<const double> to_existing) {
  if (to_existing.size() != n_) {
    throw InvariantError("distance row has the wrong length");
  }
  packed_.insert(packed_.end(), to_existing.begin(), to_existing.end());
  ++n_;
}

DistanceMatrix pairwise_distances(const Matrix& features, Metric metric) {
  DistanceMatrix dm;
  const std::size_t n = features.rows();
  dm.n_ = n;
  dm.packed_.resize(n * (n - (n > 0)) / 2);
  std::size_t k = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const auto xi = features.row(i);
    for (std::size_t j = 0; j < i; ++j) dm.packed_[k++] = distance(metric, features.row(j), xi);
  }
  dm.evals_ = k;
  return dm;
}

double cutoff_distance(std::span<const double> distances, double percent) {
  if (distances.empty()) throw ValidationError("cut-off distance needs at least one distance");
  if (!(percent > 0.0 && percent <= 100.0)) {
    throw ValidationError("percent must lie in (0, 100]");
  }
  std::vector<double> d(distances.begin(), distances.end());
  const auto m = d.size();
  // percent * M / 100 rather than percent / 100 * M: exact whenever the
  // true rank is an integer, so ceil() cannot step past it.
  auto rank = static_cast<std::size_t>(std::ceil(percent * static_cast<double>(m) / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, m);
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(rank - 1), d.end());
  return d[rank - 1];
}

double cutoff_distance(const DistanceMatrix& dm, double percent) {
  if (dm.size() < 2) throw ValidationError("cut-off distance needs at least two points");
  return cutoff_distance(dm.off_diagonal(), percent);
}

}  // namespace lapoleaf
