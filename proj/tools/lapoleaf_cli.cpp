// lapoleaf command-line front end.
//
//   lapoleaf fit     [--config c.json] [--data d.csv] --out DIR [--seed S]
//   lapoleaf predict --model m.json --data new.csv [--config c.json] [--out DIR]
//   lapoleaf add     --model m.json --data new.csv [--config c.json] [--out DIR]
//   lapoleaf bench   [--config c.json] [--out DIR] [--seed S]
//   lapoleaf export  --model m.json [--out DIR]
//
// Exit status: 0 on success, 2 on invalid input, 1 on internal errors.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lapoleaf/lapoleaf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lapoleaf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Options {
  std::string config, data, model, out;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> sizes{500, 1000, 2000, 4000};
};

Config read_config(const Options& o) {
  Config c = o.config.empty() ? default_config() : load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
}

fs::path out_dir(const Options& o) {
  if (o.out.empty()) throw ValidationError("--out is required");
  fs::create_directories(o.out);
  return o.out;
}

/// Drops configured role columns that the file does not have, so the same
/// config serves training files and unlabeled query files.
CsvSchema schema_for(const fs::path& path, CsvSchema schema) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::string header;
  std::getline(in, header);
  std::vector<std::string> names;
  std::stringstream cells(header);
  for (std::string cell; std::getline(cells, cell, ',');) {
    cell.erase(std::remove_if(cell.begin(), cell.end(),
                              [](char ch) { return ch == '"' || ch == '\r' || ch == ' '; }),
               cell.end());
    names.push_back(cell);
  }
  auto present = [&](const std::optional<std::string>& c) {
    return c && std::find(names.begin(), names.end(), *c) != names.end();
  };
  for (auto* role : {&schema.label_column, &schema.truth_column, &schema.pop_column}) {
    if (!present(*role)) role->reset();
  }
  return schema;
}

/// Seeded demo data used when fit runs without --data: 500 two-blob points
/// with 10% of the labels kept, or a folded noisy sine with the first 80%
/// of rows labeled.
CsvTable synthetic_table(const Config& c) {
  CsvTable t;
  if (c.schema.mode == TaskMode::classification) {
    auto s = synthetic::two_blobs(500, 4.0, c.seed);
    synthetic::hide_labels(s.data, 0.1, c.seed + 1);
    t.data = std::move(s.data);
    for (double y : s.truth) t.truth.emplace_back(y);
  } else {
    const auto series = synthetic::noisy_sine(1205, 50.0, 0.1, c.seed);
    t.data = fold_time_series(series, 5);
    t.truth = t.data.label;
    for (std::size_t i = t.data.size() * 4 / 5; i < t.data.size(); ++i) t.data.label[i].reset();
  }
  return t;
}

json timings_json(const StageTimings& t) {
  return {{"preprocessing", t.preprocessing},
          {"distance", t.distance},
          {"oleaf", t.oleaf},
          {"propagation", t.propagation}};
}

int cmd_fit(const Options& o) {
  const Config cfg = read_config(o);
  const fs::path dir = out_dir(o);
  StageTimings timings;

  auto start = Clock::now();
  const CsvSchema schema = o.data.empty() ? cfg.schema : schema_for(o.data, cfg.schema);
  const CsvTable table = o.data.empty() ? synthetic_table(cfg) : load_csv(o.data, schema);
  if (table.data.mode == TaskMode::classification && !schema.label_column && !o.data.empty()) {
    throw ValidationError("classification needs a label column");
  }
  auto merged = merge_duplicates(table.data);
  timings.preprocessing = seconds_since(start);
  for (const auto& w : merged.warnings) std::cerr << "warning: " << w << '\n';

  const Model model = fit(merged.data, cfg.fit, &timings);
  const Predictions pred = predictions(model);

  save_model(dir / "model.json", model);
  {
    std::ofstream out(dir / "predictions.csv", std::ios::binary);
    write_predictions_csv(out, pred, model.data, merged.row_map);
  }

  json metrics;
  metrics["mode"] = to_string(model.data.mode);
  metrics["raw_rows"] = table.data.size();
  metrics["points"] = model.size();
  metrics["labeled_points"] = model.data.labeled_count();
  metrics["d_c"] = model.d_c;
  metrics["ng_star"] = model.curve.ng_star;
  metrics["distance_evaluations"] = model.dm.eval_count();
  metrics["timings"] = timings_json(timings);
  metrics["warnings"] = merged.warnings;
  if (!table.truth.empty()) {
    // Held-out rows: ground truth present, training label absent.
    std::size_t count = 0, hits = 0;
    double sse = 0.0;
    for (std::size_t r = 0; r < table.truth.size(); ++r) {
      if (!table.truth[r] || table.data.label[r]) continue;
      ++count;
      const double y = pred.value[merged.row_map[r]];
      hits += y == *table.truth[r];
      sse += (y - *table.truth[r]) * (y - *table.truth[r]);
    }
    metrics["evaluated_rows"] = count;
    if (model.data.mode == TaskMode::classification) {
      metrics["accuracy"] = count ? json(double(hits) / double(count)) : json(nullptr);
    } else {
      metrics["sse"] = sse;
    }
  }
  write_file(dir / "metrics.json", metrics.dump(2) + "\n");
  std::cout << "fitted " << model.size() << " points, " << model.curve.ng_star
            << " subtrees; wrote " << (dir / "model.json").string() << '\n';
  return 0;
}

/// Inserts every row of --data into the model and returns one output row
/// per input row.
std::vector<std::size_t> insert_rows(Model& model, const Options& o) {
  if (o.data.empty()) throw ValidationError("--data is required");
  Config cfg = read_config(o);
  cfg.schema.mode = model.data.mode;
  const auto table = load_csv(o.data, schema_for(o.data, cfg.schema));
  if (table.data.dims() != model.data.dims()) {
    throw ValidationError("data has " + std::to_string(table.data.dims()) +
                          " feature columns, model expects " +
                          std::to_string(model.data.dims()));
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < table.data.size(); ++i) {
    rows.push_back(insert_point(model, table.data.features.row(i)).row);
  }
  return rows;
}

std::string predictions_text(const Model& model, const std::vector<std::size_t>& rows) {
  std::ostringstream out;
  write_predictions_csv(out, predictions(model), model.data, rows);
  return out.str();
}

int cmd_predict(const Options& o) {
  if (o.model.empty()) throw ValidationError("--model is required");
  Model model = load_model(o.model);
  const auto rows = insert_rows(model, o);
  const auto text = predictions_text(model, rows);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(out_dir(o) / "labels.csv", text);
  }
  return 0;
}

int cmd_add(const Options& o) {
  if (o.model.empty()) throw ValidationError("--model is required");
  Model model = load_model(o.model);
  const auto rows = insert_rows(model, o);
  const fs::path target = o.out.empty() ? fs::path(o.model) : out_dir(o) / "model.json";
  save_model(target, model);
  std::cout << predictions_text(model, rows);
  return 0;
}

int cmd_export(const Options& o) {
  if (o.model.empty()) throw ValidationError("--model is required");
  const Model model = load_model(o.model);
  std::ostringstream dot;
  write_dot(dot, model.forest, model.tree);
  if (o.out.empty()) {
    std::cout << dot.str();
  } else {
    write_file(out_dir(o) / "forest.dot", dot.str());
  }
  return 0;
}

int cmd_bench(const Options& o) {
  const Config cfg = read_config(o);
  json report = json::array();
  std::cout << "      N   distance evals   expected   propagation ms   baseline iters   "
               "baseline ms   accuracy   baseline acc\n";
  for (std::size_t n : o.sizes) {
    if (n < 4) throw ValidationError("bench sizes must be at least 4");
    auto s = synthetic::two_blobs(n, 4.0, cfg.seed + n);
    const auto kept = synthetic::hide_labels(s.data, 0.1, cfg.seed + n + 1);
    std::vector<std::uint8_t> known(n, 0);
    for (std::size_t i : kept) known[i] = 1;
    auto accuracy = [&](const std::vector<double>& value) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < n; ++i) hits += !known[i] && value[i] == s.truth[i];
      return double(hits) / double(n - kept.size());
    };

    const Model model = fit(s.data, cfg.fit);
    std::vector<double> times;
    Predictions pred;
    for (int rep = 0; rep < 5; ++rep) {
      const auto start = Clock::now();
      pred = propagate(model.data, model.forest, model.tree, model.dm);
      times.push_back(seconds_since(start));
    }
    std::sort(times.begin(), times.end());

    const auto start = Clock::now();
    const auto base = baseline::knn_label_propagation(model.data, model.dm, model.d_c);
    const double base_time = seconds_since(start);

    const std::uint64_t expected = std::uint64_t(n) * (n - 1) / 2;
    report.push_back({{"n", n},
                      {"distance_evaluations", model.dm.eval_count()},
                      {"expected_evaluations", expected},
                      {"ng_star", model.curve.ng_star},
                      {"propagation_seconds", times[2]},
                      {"accuracy", accuracy(pred.value)},
                      {"baseline_iterations", base.iterations},
                      {"baseline_converged", base.converged},
                      {"baseline_seconds", base_time},
                      {"baseline_accuracy", accuracy(base.value)}});
    char line[200];
    std::snprintf(line, sizeof line, "%7zu %16llu %10llu %16.3f %16zu %13.1f %10.4f %14.4f\n", n,
                  static_cast<unsigned long long>(model.dm.eval_count()),
                  static_cast<unsigned long long>(expected), 1e3 * times[2], base.iterations,
                  1e3 * base_time, accuracy(pred.value), accuracy(base.value));
    std::cout << line;
  }
  if (!o.out.empty()) write_file(out_dir(o) / "bench.json", report.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised labeling over density-based leading trees"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--seed", o.seed, "seed for synthetic data");
    sub->add_option("--out", o.out, "output directory");
  };
  auto* fit_cmd = app.add_subcommand("fit", "fit a model and label the unlabeled rows");
  add_common(fit_cmd);
  fit_cmd->add_option("--data", o.data, "training CSV (omit for seeded synthetic data)");

  auto* predict_cmd = app.add_subcommand("predict", "label new points against a saved model");
  add_common(predict_cmd);
  predict_cmd->add_option("--model", o.model, "model JSON")->required();
  predict_cmd->add_option("--data", o.data, "CSV of new points")->required();

  auto* add_cmd = app.add_subcommand("add", "insert points into a saved model and save it");
  add_common(add_cmd);
  add_cmd->add_option("--model", o.model, "model JSON")->required();
  add_cmd->add_option("--data", o.data, "CSV of new points")->required();

  auto* bench_cmd = app.add_subcommand("bench", "scaling benchmark on synthetic data");
  add_common(bench_cmd);
  bench_cmd->add_option("--sizes", o.sizes, "dataset sizes")->expected(1, -1);

  auto* export_cmd = app.add_subcommand("export", "write the forest as Graphviz DOT");
  add_common(export_cmd);
  export_cmd->add_option("--model", o.model, "model JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fit_cmd) return cmd_fit(o);
    if (*predict_cmd) return cmd_predict(o);
    if (*add_cmd) return cmd_add(o);
    if (*bench_cmd) return cmd_bench(o);
    if (*export_cmd) return cmd_export(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
