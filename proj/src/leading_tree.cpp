#include "lapoleaf/leading_tree.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

namespace lapoleaf {

std::vector<double> local_density(const DistanceMatrix& dm, double d_c,
                                  std::span<const std::size_t> pop) {
  if (!(d_c > 0.0) || !std::isfinite(d_c)) {
    throw ValidationError("cut-off distance must be positive and finite");
  }
  const std::size_t n = dm.size();
  if (pop.size() != n) throw ValidationError("population array has the wrong length");
  std::vector<double> rho(n, 0.0);
  // For fixed k, rho[k] receives its terms in ascending partner index.
  for (std::size_t i = 0; i < n; ++i) {
    const double pop_i = static_cast<double>(pop[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double t = density_kernel(dm(i, j), d_c);
      rho[i] += static_cast<double>(pop[j]) * t;
      rho[j] += pop_i * t;
    }
  }
  return rho;
}

std::vector<std::size_t> density_order(std::span<const double> rho) {
  std::vector<std::size_t> order(rho.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return denser(rho, a, b); });
  return order;
}

namespace {

double farthest(const DistanceMatrix& dm, std::size_t i) {
  double best = 0.0;
  for (std::size_t j = 0; j < dm.size(); ++j) best = std::max(best, dm(i, j));
  return best;
}

}  // namespace

std::size_t nearest_denser(const DistanceMatrix& dm, std::span<const double> rho,
                           std::size_t i) {
  std::size_t best = kNoParent;
  double best_d = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (j == i || !denser(rho, j, i)) continue;
    const double d = dm(i, j);
    if (best == kNoParent || d < best_d) {  // ascending j keeps the lower index on ties
      best = j;
      best_d = d;
    }
  }
  return best;
}

LeadingTree build_leading_tree(const DistanceMatrix& dm, std::vector<double> rho) {
  const std::size_t n = rho.size();
  if (dm.size() != n) throw ValidationError("density and distance sizes differ");
  for (double r : rho) {
    if (!std::isfinite(r)) throw ValidationError("non-finite density");
  }
  LeadingTree tree;
  tree.ln.assign(n, kNoParent);
  tree.delta.assign(n, 0.0);
  if (n == 0) return tree;

  const auto order = density_order(rho);
  tree.root = order.front();
  // Everything ahead of i in `order` is denser than i.
  for (std::size_t r = 1; r < n; ++r) {
    const std::size_t i = order[r];
    std::size_t best = order[0];
    double best_d = dm(i, best);
    for (std::size_t s = 1; s < r; ++s) {
      const std::size_t j = order[s];
      const double d = dm(i, j);
      if (d < best_d || (d == best_d && j < best)) {
        best = j;
        best_d = d;
      }
    }
    tree.ln[i] = best;
    tree.delta[i] = best_d;
  }
  tree.delta[tree.root] = farthest(dm, tree.root);
  tree.gamma.resize(n);
  for (std::size_t i = 0; i < n; ++i) tree.gamma[i] = rho[i] * tree.delta[i];
  tree.rho = std::move(rho);
  return tree;
}

bool is_superior(const LeadingTree& tree, std::size_t i, std::size_t j) {
  if (i >= tree.size() || j >= tree.size()) throw ValidationError("point index out of range");
  for (std::size_t k = tree.ln[i]; k != kNoParent; k = tree.ln[k]) {
    if (k == j) return true;
  }
  return false;
}

void check_invariants(const LeadingTree& tree) {
  const std::size_t n = tree.size();
  if (tree.ln.size() != n || tree.delta.size() != n || tree.gamma.size() != n) {
    throw InvariantError("leading tree arrays disagree in length");
  }
  if (n == 0) return;
  if (tree.ln[tree.root] != kNoParent) throw InvariantError("root has a leading node");
  for (std::size_t i = 0; i < n; ++i) {
    if (tree.gamma[i] != tree.rho[i] * tree.delta[i]) {
      throw InvariantError("gamma != rho * delta at " + std::to_string(i));
    }
    if (i == tree.root) continue;
    const std::size_t p = tree.ln[i];
    if (p >= n) throw InvariantError("second root at " + std::to_string(i));
    if (!denser(tree.rho, p, i)) {
      throw InvariantError("density does not increase along ln at " + std::to_string(i));
    }
  }
  // Density strictly increases along ln, so chains are acyclic and all end
  // at the unique point without a leading node.
}

void write_dot(std::ostream& out, const LeadingTree& tree) {
  out << "digraph leading_tree {\n  node [shape=circle];\n";
  for (std::size_t i = 0; i < tree.size(); ++i) {
    out << "  " << i << " [label=\"" << i << ":ρ=" << tree.rho[i] << ",δ=" << tree.delta[i]
        << "\"";
    if (i == tree.root) out << ", shape=doublecircle";
    out << "];\n";
  }
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (tree.ln[i] != kNoParent) out << "  " << i << " -> " << tree.ln[i] << ";\n";
  }
  out << "}\n";
}

}  // namespace lapoleaf
