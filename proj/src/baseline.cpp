#include "lapoleaf/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lapoleaf/leading_tree.hpp"

namespace lapoleaf::baseline {

IterativeResult knn_label_propagation(const Dataset& data, const DistanceMatrix& dm, double d_c,
                                      const IterativeParams& params) {
  const std::size_t n = data.size();
  const std::size_t width = data.label_width();
  const std::size_t k = std::min(params.k, n - 1);

  // Symmetrized k-NN adjacency as sorted neighbour lists.
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::swap(idx[i], idx[n - 1]);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end() - 1,
                      [&](std::size_t a, std::size_t b) {
                        return dm(i, a) < dm(i, b) || (dm(i, a) == dm(i, b) && a < b);
                      });
    for (std::size_t m = 0; m < k; ++m) {
      const std::size_t j = idx[m];
      const double w = density_kernel(dm(i, j), d_c);
      adj[i].emplace_back(j, w);
      adj[j].emplace_back(i, w);
    }
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               nbrs.end());
  }

  Matrix f(n, width);
  for (std::size_t i = 0; i < n; ++i) {
    if (!data.label[i]) continue;
    if (data.mode == TaskMode::classification) {
      f(i, static_cast<std::size_t>(*data.label[i])) = 1.0;
    } else {
      f(i, 0) = *data.label[i];
    }
  }

  IterativeResult result;
  Matrix next = f;
  while (result.iterations < params.max_iterations) {
    ++result.iterations;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (data.label[i]) continue;
      auto out = next.row(i);
      std::fill(out.begin(), out.end(), 0.0);
      double wsum = 0.0;
      for (const auto& [j, w] : adj[i]) {
        wsum += w;
        const auto src = f.row(j);
        for (std::size_t c = 0; c < width; ++c) out[c] += w * src[c];
      }
      if (wsum > 0.0) {
        for (double& v : out) v /= wsum;
      }
      const auto old = f.row(i);
      for (std::size_t c = 0; c < width; ++c) change = std::max(change, std::abs(out[c] - old[c]));
    }
    std::swap(f, next);
    if (change < params.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.value.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = f.row(i);
    result.value[i] = data.mode == TaskMode::regression
                          ? row[0]
                          : static_cast<double>(std::max_element(row.begin(), row.end()) -
                                                row.begin());
  }
  return result;
}

double knn_regress(const Matrix& train, std::span<const double> targets,
                   std::span<const double> query, std::size_t k) {
  const std::size_t n = train.rows();
  if (n == 0 || targets.size() != n) throw ValidationError("k-NN regression needs training data");
  k = std::min(k, n);
  std::vector<std::pair<double, std::size_t>> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = {distance(Metric::euclidean, train.row(i), query), i};
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  double sum = 0.0;
  for (std::size_t m = 0; m < k; ++m) sum += targets[d[m].second];
  return sum / static_cast<double>(k);
}

}  // namespace lapoleaf::baseline
