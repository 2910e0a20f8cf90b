#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lapoleaf/leading_tree.hpp"

namespace lapoleaf {

/// Strictly increasing granule-count penalty H(x), from a closed family:
///   linear       a*x + c
///   logarithm    a*ln(x) + c
///   power        a*x^b + c        (b > 0)
///   exponential  a*b^x + c        (b > 1)
///   product      a*x*b^x + c      (b >= 1), e.g. 80x*1.001^x
/// `a` must be positive in every case.
struct HSpec {
  enum class Kind { linear, logarithm, power, exponential, product };

  Kind kind = Kind::linear;
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;

  double operator()(double x) const;
  void validate() const;

  static HSpec linear(double slope) { return {Kind::linear, slope, 1.0, 0.0}; }
  static HSpec product(double scale, double base) { return {Kind::product, scale, base, 0.0}; }

  friend bool operator==(const HSpec&, const HSpec&) = default;
};

std::string to_string(HSpec::Kind kind);
HSpec::Kind h_kind_from_string(const std::string& name);

struct LodogParams {
  HSpec h = HSpec::linear(0.1);
  double alpha = 0.5;
  /// Cap on the granule counts searched; unset means default_n_max(N).
  std::optional<std::size_t> n_max;

  void validate() const;
  std::size_t effective_n_max(std::size_t n) const;

  friend bool operator==(const LodogParams&, const LodogParams&) = default;
};

/// min(N, ceil(sqrt(N)) + 50)
std::size_t default_n_max(std::size_t n);

/// Points ranked by center potential, highest first (ties to the lower
/// index), with the whole-tree root moved to the front if it did not
/// already rank first. Only order[0, sorted) is ranked; the rest holds the
/// remaining points in no particular order.
struct GammaRanking {
  std::vector<std::size_t> order;
  std::size_t sorted = 0;
  bool forced_root = false;
};

GammaRanking rank_by_gamma(const LeadingTree& tree);
/// Ranks only the top `count` points: O(N + count log count).
GammaRanking rank_by_gamma(const LeadingTree& tree, std::size_t count);

/// The objective Q(N_g) = alpha*H(N_g) + (1-alpha)*sum_i DCost(Omega_i),
/// evaluated for N_g = 1..n_max with the top-N_g ranked points as roots.
struct LodogCurve {
  std::vector<double> q;  ///< q[k] = Q(k + 1)
  std::size_t ng_star = 1;
  double alpha = 0.5;
  std::size_t n_max = 1;
  GammaRanking ranking;
};

/// One gamma sort plus a suffix sum of delta; O(N log N). Cutting a point
/// out as a root removes exactly its delta from the summed DCost, so the
/// cost at N_g is the delta sum over ranks N_g..N-1. Argmin ties go to the
/// smallest N_g.
LodogCurve evaluate_objective(const LeadingTree& tree, const HSpec& h, double alpha,
                              std::size_t n_max);
LodogCurve evaluate_objective(const LeadingTree& tree, const LodogParams& params);

/// Leading tree cut into subtrees at the top-ranked roots.
struct LeadingForest {
  std::vector<std::size_t> roots;       ///< subtree k is rooted at roots[k]
  std::vector<std::size_t> subtree_id;  ///< per point
  std::vector<std::size_t> parent;      ///< ln with root edges cut
  std::vector<std::size_t> layer;       ///< 0 at roots
  std::vector<std::size_t> max_layer;   ///< per subtree
  /// Breadth-first order over all subtrees at once; layers never decrease.
  std::vector<std::size_t> bfs_order;
  /// Children in CSR form, ascending index within each parent.
  std::vector<std::size_t> child_offset;
  std::vector<std::size_t> child_index;
  bool forced_root = false;

  std::size_t size() const noexcept { return parent.size(); }
  std::size_t num_subtrees() const noexcept { return roots.size(); }
  bool is_root(std::size_t i) const noexcept { return parent[i] == kNoParent; }
  std::span<const std::size_t> children(std::size_t p) const noexcept {
    return std::span<const std::size_t>(child_index)
        .subspan(child_offset[p], child_offset[p + 1] - child_offset[p]);
  }
  std::vector<std::size_t> subtree_sizes() const;

  friend bool operator==(const LeadingForest&, const LeadingForest&) = default;
};

LeadingForest split_forest(const LeadingTree& tree, std::size_t ng);
LeadingForest split_forest(const LeadingTree& tree, const GammaRanking& ranking, std::size_t ng);

/// Graphviz digraph with one cluster per subtree and roots highlighted.
void write_dot(std::ostream& out, const LeadingForest& forest, const LeadingTree& tree);

}  // namespace lapoleaf
