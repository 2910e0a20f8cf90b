#include "lapoleaf/propagation.hpp"

#include <algorithm>
#include <cmath>

namespace lapoleaf {

bool LabelState::all_labeled() const noexcept {
  return std::all_of(is_labeled.begin(), is_labeled.end(), [](std::uint8_t f) { return f != 0; });
}

namespace {

void require_stage(const LabelState& state, Stage expected, const char* pass) {
  if (state.stage != expected) {
    throw InvariantError(std::string(pass) + " called on a label state in the wrong stage");
  }
}

void copy_row(Matrix& m, std::size_t to, std::size_t from) {
  const auto src = m.row(from);
  std::copy(src.begin(), src.end(), m.row(to).begin());
}

}  // namespace

LabelState init_labels(const Dataset& data) {
  // Features play no part in propagation, so only the label side is checked.
  const std::size_t n = data.size();
  if (n == 0) throw ValidationError("dataset is empty");
  if (data.pop.size() != n || data.label.size() != n) {
    throw ValidationError("dataset arrays disagree in length");
  }
  const bool classify = data.mode == TaskMode::classification;
  const double classes = static_cast<double>(data.num_classes());
  if (classify && classes < 2) {
    throw ValidationError("classification needs at least two classes");
  }

  LabelState state;
  state.labels = Matrix(n, data.label_width());
  state.is_labeled.assign(n, 0);
  state.is_ground_truth.assign(n, 0);
  std::size_t known = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.pop[i] == 0) {
      throw ValidationError("population of row " + std::to_string(i) + " is zero");
    }
    const auto& l = data.label[i];
    if (!l) continue;
    const double v = *l;
    if (!std::isfinite(v)) throw ValidationError("non-finite label at row " + std::to_string(i));
    if (classify) {
      if (v < 0 || v != std::floor(v) || v >= classes) {
        throw ValidationError("class id out of range at row " + std::to_string(i));
      }
      state.labels(i, static_cast<std::size_t>(v)) = 1.0;
    } else {
      state.labels(i, 0) = v;
    }
    state.is_labeled[i] = 1;
    state.is_ground_truth[i] = 1;
    ++known;
  }
  if (known == 0) throw ValidationError("nothing to propagate: no labeled points");
  return state;
}

namespace {

[[noreturn, gnu::noinline]] void zero_edge(std::size_t i, std::size_t p) {
  throw InvariantError("zero distance between points " + std::to_string(i) + " and " +
                       std::to_string(p) + "; duplicates were not merged");
}

inline void check_edge(double d, std::size_t i, std::size_t p) {
  if (!(d > 0.0)) [[unlikely]] zero_edge(i, p);
}

inline double weight_from(double d, std::span<const std::size_t> pop, std::size_t i,
                          std::size_t p) {
  check_edge(d, i, p);
  return static_cast<double>(pop[i]) / d;
}

// `dist(c, p)` gives the length of the edge from child c to its parent p.
template <class Dist>
LabelState c2p_impl(LabelState state, const LeadingForest& forest, const Dist& dist,
                    std::span<const std::size_t> pop, C2pWeights weights) {
  require_stage(state, Stage::initialized, "c2p");
  const std::size_t k = state.width();
  std::vector<double> acc(k);
  // Reverse breadth-first order visits every child before its parent.
  for (auto it = forest.bfs_order.rbegin(); it != forest.bfs_order.rend(); ++it) {
    const std::size_t p = *it;
    const auto kids = forest.children(p);
    if (kids.empty() || state.is_labeled[p]) continue;
    bool any = false;
    double weight_sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc[j] = 0.0;
    for (std::size_t c : kids) {
      const double d = dist(c, p);
      if (!state.is_labeled[c]) {
        if (weights == C2pWeights::all) {
          weight_sum += weight_from(d, pop, c, p);
        } else {
          check_edge(d, c, p);
        }
        continue;
      }
      const double w = weight_from(d, pop, c, p);
      weight_sum += w;
      any = true;
      const double* lc = state.labels.row(c).data();
      for (std::size_t j = 0; j < k; ++j) acc[j] += w * lc[j];
    }
    if (!any) continue;
    auto lp = state.labels.row(p);
    for (std::size_t j = 0; j < k; ++j) lp[j] = acc[j] / weight_sum;
    state.is_labeled[p] = 1;
  }
  state.stage = Stage::after_c2p;
  return state;
}

template <class Dist>
LabelState p2c_impl(LabelState state, const LeadingForest& forest, const Dist& dist,
                    std::span<const std::size_t> pop, P2cRule rule);

}  // namespace

double edge_weight(const DistanceMatrix& dm, std::span<const std::size_t> pop, std::size_t i,
                   std::size_t p) {
  return weight_from(dm(i, p), pop, i, p);
}

LabelState c2p(LabelState state, const LeadingForest& forest, const DistanceMatrix& dm,
               std::span<const std::size_t> pop, C2pWeights weights) {
  return c2p_impl(
      std::move(state), forest, [&](std::size_t c, std::size_t p) { return dm(c, p); }, pop,
      weights);
}

LabelState r2r(LabelState state, const LeadingForest& forest, const LeadingTree& tree,
               const DistanceMatrix& dm) {
  require_stage(state, Stage::after_c2p, "r2r");
  std::vector<std::size_t> lenders;
  for (std::size_t r : forest.roots) {
    if (state.is_labeled[r]) lenders.push_back(r);
  }
  if (lenders.empty()) throw InvariantError("no labeled root after c2p");
  std::sort(lenders.begin(), lenders.end());

  const std::size_t top = tree.root;
  if (!forest.is_root(top)) throw InvariantError("whole-tree root is not a forest root");
  if (!state.is_labeled[top]) {
    std::size_t best = lenders.front();
    for (std::size_t r : lenders) {
      if (dm(top, r) < dm(top, best)) best = r;
    }
    copy_row(state.labels, top, best);
    state.is_labeled[top] = 1;
    lenders.insert(std::upper_bound(lenders.begin(), lenders.end(), top), top);
  }

  std::vector<std::pair<std::size_t, std::size_t>> borrow;  // (borrower, lender)
  for (std::size_t r : forest.roots) {
    if (state.is_labeled[r]) continue;
    std::size_t best = kNoParent;
    double best_d = 0.0;
    for (std::size_t a = tree.ln[r]; a != kNoParent; a = tree.ln[a]) {
      if (!forest.is_root(a) || !std::binary_search(lenders.begin(), lenders.end(), a)) continue;
      const double d = dm(r, a);
      if (best == kNoParent || d < best_d || (d == best_d && a < best)) {
        best = a;
        best_d = d;
      }
    }
    if (best == kNoParent) throw InvariantError("unlabeled root has no labeled superior");
    borrow.emplace_back(r, best);
  }
  for (const auto& [r, lender] : borrow) {
    copy_row(state.labels, r, lender);
    state.is_labeled[r] = 1;
  }
  state.stage = Stage::after_r2r;
  return state;
}

P2cRule default_p2c_rule(TaskMode mode) {
  return mode == TaskMode::classification ? P2cRule::raw : P2cRule::anchored;
}

LabelState p2c(LabelState state, const LeadingForest& forest, const DistanceMatrix& dm,
               std::span<const std::size_t> pop, P2cRule rule) {
  return p2c_impl(
      std::move(state), forest, [&](std::size_t c, std::size_t p) { return dm(c, p); }, pop,
      rule);
}

namespace {

template <class Dist>
LabelState p2c_impl(LabelState state, const LeadingForest& forest, const Dist& dist,
                    std::span<const std::size_t> pop, P2cRule rule) {
  require_stage(state, Stage::after_r2r, "p2c");
  const std::size_t k = state.width();
  std::vector<double> target(k), labeled_sum(k);
  std::vector<std::size_t> open;
  for (std::size_t p : forest.bfs_order) {
    const auto kids = forest.children(p);
    if (kids.empty()) continue;
    if (!state.is_labeled[p]) throw InvariantError("unlabeled parent reached in p2c");

    const double* lp = state.labels.row(p).data();
    const bool mixed = std::any_of(kids.begin(), kids.end(),
                                   [&](std::size_t c) { return state.is_labeled[c] != 0; });
    if (!mixed) {
      for (std::size_t c : kids) {
        check_edge(dist(c, p), c, p);
        double* lc = state.labels.row(c).data();
        for (std::size_t j = 0; j < k; ++j) lc[j] = lp[j];
        state.is_labeled[c] = 1;
      }
      continue;
    }

    open.clear();
    double all_w = 0.0, open_w = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      target[j] = lp[j];
      labeled_sum[j] = 0.0;
    }
    for (std::size_t c : kids) {
      const double w = weight_from(dist(c, p), pop, c, p);
      all_w += w;
      if (state.is_labeled[c]) {
        const double* lc = state.labels.row(c).data();
        for (std::size_t j = 0; j < k; ++j) labeled_sum[j] += w * lc[j];
      } else {
        open.push_back(c);
        open_w += w;
      }
    }
    const bool copy_parent = rule == P2cRule::anchored && state.is_ground_truth[p];
    if (open.size() < kids.size() && !copy_parent) {
      for (std::size_t j = 0; j < k; ++j) target[j] -= labeled_sum[j] / all_w;
      if (rule != P2cRule::raw) {
        const double c_factor = all_w / open_w;
        for (double& v : target) v *= c_factor;
      }
    }
    for (std::size_t c : open) {
      double* lc = state.labels.row(c).data();
      for (std::size_t j = 0; j < k; ++j) lc[j] = target[j];
      state.is_labeled[c] = 1;
    }
  }
  state.stage = Stage::after_p2c;
  return state;
}

}  // namespace

Predictions finalize(LabelState&& state, TaskMode mode) {
  require_stage(state, Stage::after_p2c, "finalize");
  Predictions out;
  out.mode = mode;
  out.scores = std::move(state.labels);
  const std::size_t n = out.scores.rows(), k = out.scores.cols();
  out.value.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = out.scores.row(i).data();
    if (mode == TaskMode::regression) {
      out.value[i] = row[0];
    } else {
      // First maximum, i.e. the lowest class id on ties.
      std::size_t best = 0;
      for (std::size_t j = 1; j < k; ++j) {
        if (row[j] > row[best]) best = j;
      }
      out.value[i] = static_cast<double>(best);
    }
  }
  return out;
}

Predictions finalize(const LabelState& state, TaskMode mode) {
  return finalize(LabelState(state), mode);
}

LabelState propagate_state(const Dataset& data, const LeadingForest& forest,
                           const LeadingTree& tree, const DistanceMatrix& dm) {
  if (forest.size() != data.size() || tree.size() != data.size() || dm.size() != data.size()) {
    throw ValidationError("dataset, tree, forest and distances disagree in size");
  }
  auto state = init_labels(data);
  // Every forest edge is a tree edge, so its length is the child's delta.
  // Reading it from there keeps the passes off the quadratic matrix.
  const auto edge = [&](std::size_t c, std::size_t) { return tree.delta[c]; };
  state = c2p_impl(std::move(state), forest, edge, data.pop, C2pWeights::labeled);
  state = r2r(std::move(state), forest, tree, dm);
  return p2c_impl(std::move(state), forest, edge, data.pop, default_p2c_rule(data.mode));
}

Predictions propagate(const Dataset& data, const LeadingForest& forest, const LeadingTree& tree,
                      const DistanceMatrix& dm) {
  return finalize(propagate_state(data, forest, tree, dm), data.mode);
}

}  // namespace lapoleaf
