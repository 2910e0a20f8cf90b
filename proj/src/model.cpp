#include "lapoleaf/model.hpp"

#include <chrono>
#include <cmath>

namespace lapoleaf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void FitParams::validate() const {
  if (!(percent > 0.0 && percent <= 100.0)) throw ValidationError("percent must lie in (0, 100]");
  lodog.validate();
}

void refresh_forest(Model& model, StageTimings* timings) {
  auto start = Clock::now();
  model.curve = evaluate_objective(model.tree, model.params.lodog);
  model.forest = split_forest(model.tree, model.curve.ranking, model.curve.ng_star);
  if (timings) timings->oleaf += seconds_since(start);

  start = Clock::now();
  model.state = propagate_state(model.data, model.forest, model.tree, model.dm);
  if (timings) timings->propagation += seconds_since(start);
}

namespace {

Model fit_impl(Dataset data, const FitParams& params, const double* fixed_cutoff,
               StageTimings* timings) {
  params.validate();
  validate(data);
  if (data.size() < 2) throw ValidationError("fitting needs at least two distinct points");

  Model model;
  model.params = params;
  auto start = Clock::now();
  model.dm = pairwise_distances(data.features, params.metric);
  if (timings) timings->distance += seconds_since(start);

  start = Clock::now();
  model.d_c = fixed_cutoff ? *fixed_cutoff : cutoff_distance(model.dm, params.percent);
  model.tree = build_leading_tree(model.dm, local_density(model.dm, model.d_c, data.pop));
  model.order = density_order(model.tree.rho);
  if (timings) timings->oleaf += seconds_since(start);

  model.data = std::move(data);
  refresh_forest(model, timings);
  return model;
}

}  // namespace

Model fit(Dataset data, const FitParams& params, StageTimings* timings) {
  return fit_impl(std::move(data), params, nullptr, timings);
}

Model fit_with_cutoff(Dataset data, const FitParams& params, double d_c, StageTimings* timings) {
  if (!(d_c > 0.0) || !std::isfinite(d_c)) {
    throw ValidationError("cut-off distance must be positive and finite");
  }
  return fit_impl(std::move(data), params, &d_c, timings);
}

Predictions predictions(const Model& model) { return finalize(model.state, model.data.mode); }

}  // namespace lapoleaf
