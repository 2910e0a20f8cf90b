#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "lapoleaf/core.hpp"
#include "lapoleaf/distance.hpp"

namespace lapoleaf {

/// Whole-dataset leading tree: every point points at its nearest strictly
/// denser neighbour (its leading node). Flat arrays indexed by point.
struct LeadingTree {
  std::vector<double> rho;    ///< local density
  std::vector<double> delta;  ///< distance to the leading node
  std::vector<double> gamma;  ///< center potential rho * delta
  std::vector<std::size_t> ln;  ///< leading node; kNoParent at the root
  std::size_t root = 0;

  std::size_t size() const noexcept { return rho.size(); }

  friend bool operator==(const LeadingTree&, const LeadingTree&) = default;
};

/// Gaussian kernel term shared by every density computation.
inline double density_kernel(double d, double d_c) {
  const double r = d / d_c;
  return std::exp(-r * r);
}

/// Strict "denser than" order: higher rho wins, equal rho goes to the
/// lower index. Every tree relation in the library uses this order.
inline bool denser(std::span<const double> rho, std::size_t a, std::size_t b) {
  return rho[a] > rho[b] || (rho[a] == rho[b] && a < b);
}

/// rho[i] = sum over j != i, in ascending j, of pop[j] * exp(-(d_ij/d_c)^2).
/// The fixed summation order lets incremental updates reproduce it exactly.
std::vector<double> local_density(const DistanceMatrix& dm, double d_c,
                                  std::span<const std::size_t> pop);

/// Point indices sorted densest first under denser().
std::vector<std::size_t> density_order(std::span<const double> rho);

/// Leading nodes, delta-distances and gamma from densities. Distance ties
/// go to the lower index. The root takes its largest distance to any point
/// as delta (0 for a single point).
LeadingTree build_leading_tree(const DistanceMatrix& dm, std::vector<double> rho);

/// Leading node of i among all points denser than i, by full scan.
/// Returns kNoParent when i is the densest point.
std::size_t nearest_denser(const DistanceMatrix& dm, std::span<const double> rho,
                           std::size_t i);

/// True iff j is reached from i by following ln one or more times.
bool is_superior(const LeadingTree& tree, std::size_t i, std::size_t j);

/// Checks the structural invariants (strict density increase along ln,
/// acyclicity, single root, gamma = rho * delta). Throws InvariantError.
void check_invariants(const LeadingTree& tree);

/// Graphviz digraph with one edge i -> ln[i] per non-root point.
void write_dot(std::ostream& out, const LeadingTree& tree);

}  // namespace lapoleaf
