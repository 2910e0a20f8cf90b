#include "lapoleaf/incremental.hpp"

#include <algorithm>
#include <cmath>

namespace lapoleaf {

namespace {

// Leading node of i: nearest among order[0, rank_i), lower index on ties.
std::pair<std::size_t, double> scan_prefix(const DistanceMatrix& dm,
                                           std::span<const std::size_t> order, std::size_t rank_i,
                                           std::size_t i) {
  std::size_t best = kNoParent;
  double best_d = 0.0;
  for (std::size_t s = 0; s < rank_i; ++s) {
    const std::size_t j = order[s];
    const double d = dm(i, j);
    if (best == kNoParent || d < best_d || (d == best_d && j < best)) {
      best = j;
      best_d = d;
    }
  }
  return {best, best_d};
}

// Re-sorts model.order after every density changed, flagging points whose
// leading node may have moved: a point whose leading node dropped below it,
// or one overtaken by a point closer than its current leading node.
void resort_and_flag(Model& model, std::vector<std::uint8_t>& flagged) {
  auto& order = model.order;
  const auto& rho = model.tree.rho;
  const auto& ln = model.tree.ln;
  const auto& delta = model.tree.delta;
  for (std::size_t r = 1; r < order.size(); ++r) {
    const std::size_t v = order[r];
    std::size_t s = r;
    // Insertion sort swaps exactly the pairs whose order flipped.
    while (s > 0 && denser(rho, v, order[s - 1])) {
      const std::size_t u = order[s - 1];
      if (ln[v] == u) flagged[v] = 1;
      if (ln[u] == kNoParent) {
        flagged[u] = 1;
      } else {
        const double d = model.dm(u, v);
        if (d < delta[u] || (d == delta[u] && v < ln[u])) flagged[u] = 1;
      }
      order[s] = u;
      --s;
    }
    order[s] = v;
  }
}

void rebuild_links(Model& model, std::vector<std::uint8_t>& flagged, std::size_t old_root,
                   std::size_t added, InsertResult& result) {
  auto& tree = model.tree;
  const auto& order = model.order;
  const std::size_t n = tree.size();
  const std::size_t root = order.front();

  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

  flagged[old_root] = 1;
  if (added != kNoParent) flagged[added] = 1;

  for (std::size_t i = 0; i < n; ++i) {
    if (i == root) continue;
    if (flagged[i]) {
      if (i != added) ++result.rescanned;
      const auto [p, d] = scan_prefix(model.dm, order, rank[i], i);
      tree.ln[i] = p;
      tree.delta[i] = d;
    } else if (added != kNoParent && rank[added] < rank[i]) {
      // The new point has the highest index, so it only wins strictly.
      const double d = model.dm(i, added);
      if (d < tree.delta[i]) {
        tree.ln[i] = added;
        tree.delta[i] = d;
      }
    }
  }
  // An unchanged root only gains the new point as a candidate farthest point.
  double far = 0.0;
  if (root == old_root) {
    far = tree.delta[root];
    if (added != kNoParent) far = std::max(far, model.dm(root, added));
  } else {
    for (std::size_t j = 0; j < n; ++j) far = std::max(far, model.dm(root, j));
  }
  tree.root = root;
  tree.ln[root] = kNoParent;
  tree.delta[root] = far;
  tree.gamma.resize(n);
  for (std::size_t i = 0; i < n; ++i) tree.gamma[i] = tree.rho[i] * tree.delta[i];
}

}  // namespace

InsertResult insert_point(Model& model, std::span<const double> x) {
  if (x.size() != model.data.dims()) {
    throw ValidationError("point has " + std::to_string(x.size()) + " features, model expects " +
                          std::to_string(model.data.dims()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
  }
  const std::size_t n = model.size();
  InsertResult result;
  const auto before = model.dm.eval_count();
  const auto dist = model.dm.measure(model.data.features, x, model.params.metric);
  result.distance_evaluations = model.dm.eval_count() - before;

  std::size_t twin = kNoParent;
  for (std::size_t j = 0; j < n && twin == kNoParent; ++j) {
    const auto row = model.data.features.row(j);
    if (std::equal(row.begin(), row.end(), x.begin(), x.end())) twin = j;
  }

  auto& rho = model.tree.rho;
  const std::size_t old_root = model.tree.root;
  std::size_t added = kNoParent;
  if (twin != kNoParent) {
    result.row = twin;
    result.merged = true;
    model.data.pop[twin] += 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != twin) rho[j] += density_kernel(dist[j], model.d_c);
    }
  } else {
    // Same term order as local_density(): ascending partner index.
    double rho_x = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = density_kernel(dist[j], model.d_c);
      rho_x += static_cast<double>(model.data.pop[j]) * t;
      rho[j] += t;  // the new point has pop 1
    }
    model.data.append(x);
    model.dm.append(dist);
    rho.push_back(rho_x);
    model.tree.ln.push_back(kNoParent);
    model.tree.delta.push_back(0.0);
    added = n;
    result.row = n;
  }

  std::vector<std::uint8_t> flagged(model.size(), 0);
  resort_and_flag(model, flagged);
  if (added != kNoParent) {
    const auto pos = std::partition_point(model.order.begin(), model.order.end(),
                                          [&](std::size_t a) { return denser(rho, a, added); });
    model.order.insert(pos, added);
  }
  rebuild_links(model, flagged, old_root, added, result);
  refresh_forest(model);
  return result;
}

NewLabel predict_new(Model& model, std::span<const double> x) {
  const auto ins = insert_point(model, x);
  NewLabel out;
  out.row = ins.row;
  out.merged = ins.merged;
  const auto row = model.state.labels.row(ins.row);
  out.scores.assign(row.begin(), row.end());
  if (model.data.mode == TaskMode::regression) {
    out.value = row[0];
  } else {
    out.value = static_cast<double>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

}  // namespace lapoleaf
