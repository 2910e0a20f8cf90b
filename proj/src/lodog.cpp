#include "lapoleaf/lodog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace lapoleaf {

double HSpec::operator()(double x) const {
  switch (kind) {
    case Kind::linear: return a * x + c;
    case Kind::logarithm: return a * std::log(x) + c;
    case Kind::power: return a * std::pow(x, b) + c;
    case Kind::exponential: return a * std::pow(b, x) + c;
    case Kind::product: return a * x * std::pow(b, x) + c;
  }
  return 0.0;
}

void HSpec::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw ValidationError("H coefficients must be finite");
  }
  if (!(a > 0.0)) throw ValidationError("H coefficient a must be positive");
  if (kind == Kind::power && !(b > 0.0)) throw ValidationError("power H needs b > 0");
  if (kind == Kind::exponential && !(b > 1.0)) throw ValidationError("exponential H needs b > 1");
  if (kind == Kind::product && !(b >= 1.0)) throw ValidationError("product H needs b >= 1");
}

std::string to_string(HSpec::Kind kind) {
  switch (kind) {
    case HSpec::Kind::linear: return "linear";
    case HSpec::Kind::logarithm: return "logarithm";
    case HSpec::Kind::power: return "power";
    case HSpec::Kind::exponential: return "exponential";
    case HSpec::Kind::product: return "product";
  }
  return "linear";
}

HSpec::Kind h_kind_from_string(const std::string& name) {
  for (auto k : {HSpec::Kind::linear, HSpec::Kind::logarithm, HSpec::Kind::power,
                 HSpec::Kind::exponential, HSpec::Kind::product}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown H kind '" + name + "'");
}

void LodogParams::validate() const {
  h.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  if (n_max && *n_max == 0) throw ValidationError("n_max must be at least 1");
}

std::size_t default_n_max(std::size_t n) {
  const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  return std::min(n, root + 50);
}

std::size_t LodogParams::effective_n_max(std::size_t n) const {
  return n_max ? std::min(*n_max, n) : default_n_max(n);
}

GammaRanking rank_by_gamma(const LeadingTree& tree, std::size_t count) {
  const std::size_t n = tree.size();
  count = std::min(count, n);
  GammaRanking ranking;
  ranking.sorted = count;
  auto& order = ranking.order;
  order.resize(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& g = tree.gamma;
  const auto higher = [&](std::size_t x, std::size_t y) {
    return g[x] > g[y] || (g[x] == g[y] && x < y);
  };
  const auto mid = order.begin() + static_cast<std::ptrdiff_t>(count);
  if (count < n) std::nth_element(order.begin(), mid, order.end(), higher);
  std::sort(order.begin(), mid, higher);
  if (n > 0 && order.front() != tree.root) {
    // Only reachable on exact gamma ties with a lower-index point.
    ranking.forced_root = true;
    const auto it = std::find(order.begin(), order.end(), tree.root);
    std::rotate(order.begin(), it, it + 1);
    if (it >= mid && count < n) ranking.sorted = count + 1;
  }
  return ranking;
}

GammaRanking rank_by_gamma(const LeadingTree& tree) { return rank_by_gamma(tree, tree.size()); }

LodogCurve evaluate_objective(const LeadingTree& tree, const HSpec& h, double alpha,
                              std::size_t n_max) {
  h.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  const std::size_t n = tree.size();
  if (n_max < 1 || n_max > n) throw ValidationError("n_max must lie in [1, N]");

  LodogCurve curve;
  curve.alpha = alpha;
  curve.n_max = n_max;
  curve.ranking = rank_by_gamma(tree, n_max);
  const auto& order = curve.ranking.order;

  // suffix[k]: delta summed over ranks k..N-1, the total DCost with k roots.
  // Ranks past n_max are never roots, so their sum is taken in any order.
  std::vector<double> suffix(n_max + 1, 0.0);
  for (std::size_t r = n_max; r < n; ++r) suffix[n_max] += tree.delta[order[r]];
  for (std::size_t r = n_max; r-- > 1;) suffix[r] = suffix[r + 1] + tree.delta[order[r]];

  curve.q.resize(n_max);
  for (std::size_t ng = 1; ng <= n_max; ++ng) {
    curve.q[ng - 1] = alpha * h(static_cast<double>(ng)) + (1.0 - alpha) * suffix[ng];
    if (!std::isfinite(curve.q[ng - 1])) {
      throw ValidationError("objective is not finite at N_g = " + std::to_string(ng));
    }
  }
  curve.ng_star = static_cast<std::size_t>(std::min_element(curve.q.begin(), curve.q.end()) -
                                           curve.q.begin()) + 1;
  return curve;
}

LodogCurve evaluate_objective(const LeadingTree& tree, const LodogParams& params) {
  params.validate();
  return evaluate_objective(tree, params.h, params.alpha, params.effective_n_max(tree.size()));
}

std::vector<std::size_t> LeadingForest::subtree_sizes() const {
  std::vector<std::size_t> sizes(roots.size(), 0);
  for (std::size_t s : subtree_id) ++sizes[s];
  return sizes;
}

LeadingForest split_forest(const LeadingTree& tree, std::size_t ng) {
  return split_forest(tree, rank_by_gamma(tree, ng), ng);
}

LeadingForest split_forest(const LeadingTree& tree, const GammaRanking& ranking, std::size_t ng) {
  const std::size_t n = tree.size();
  if (ng < 1 || ng > n) throw ValidationError("granule count must lie in [1, N]");
  if (ranking.order.size() != n) throw InvariantError("ranking does not match the tree");
  if (ng > ranking.sorted) throw InvariantError("granule count exceeds the ranked prefix");

  LeadingForest f;
  f.forced_root = ranking.forced_root;
  f.roots.assign(ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(ng));
  f.parent = tree.ln;
  for (std::size_t r : f.roots) f.parent[r] = kNoParent;

  f.child_offset.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (f.parent[i] != kNoParent) ++f.child_offset[f.parent[i] + 1];
  }
  std::partial_sum(f.child_offset.begin(), f.child_offset.end(), f.child_offset.begin());
  f.child_index.resize(f.child_offset[n]);
  std::vector<std::size_t> fill(f.child_offset.begin(), f.child_offset.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (f.parent[i] != kNoParent) f.child_index[fill[f.parent[i]]++] = i;
  }

  f.subtree_id.assign(n, kNoParent);
  f.layer.assign(n, 0);
  f.max_layer.assign(ng, 0);
  f.bfs_order.reserve(n);
  for (std::size_t s = 0; s < ng; ++s) {
    f.subtree_id[f.roots[s]] = s;
    f.bfs_order.push_back(f.roots[s]);
  }
  for (std::size_t head = 0; head < f.bfs_order.size(); ++head) {
    const std::size_t p = f.bfs_order[head];
    for (std::size_t c : f.children(p)) {
      f.subtree_id[c] = f.subtree_id[p];
      f.layer[c] = f.layer[p] + 1;
      f.max_layer[f.subtree_id[c]] = std::max(f.max_layer[f.subtree_id[c]], f.layer[c]);
      f.bfs_order.push_back(c);
    }
  }
  if (f.bfs_order.size() != n) throw InvariantError("leading tree has unreachable points");
  return f;
}

void write_dot(std::ostream& out, const LeadingForest& forest, const LeadingTree& tree) {
  std::vector<std::vector<std::size_t>> members(forest.num_subtrees());
  for (std::size_t i : forest.bfs_order) members[forest.subtree_id[i]].push_back(i);

  out << "digraph leading_forest {\n  node [shape=circle];\n";
  for (std::size_t s = 0; s < members.size(); ++s) {
    out << "  subgraph cluster_" << s << " {\n    label=\"subtree " << s << "\";\n";
    for (std::size_t i : members[s]) {
      out << "    " << i << " [label=\"" << i << ":ρ=" << tree.rho[i] << ",δ=" << tree.delta[i]
          << ",γ=" << tree.gamma[i] << "\"";
      if (forest.is_root(i)) out << ", shape=doublecircle, style=filled, fillcolor=gold";
      out << "];\n";
    }
    out << "  }\n";
  }
  for (std::size_t i = 0; i < forest.size(); ++i) {
    if (!forest.is_root(i)) out << "  " << i << " -> " << forest.parent[i] << ";\n";
  }
  out << "}\n";
}

}  // namespace lapoleaf
