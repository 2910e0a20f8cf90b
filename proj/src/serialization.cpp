#include "lapoleaf/serialization.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace lapoleaf {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

json h_to_json(const HSpec& h) {
  return {{"kind", to_string(h.kind)}, {"a", h.a}, {"b", h.b}, {"c", h.c}};
}

HSpec h_from_json(const json& j) {
  HSpec h;
  h.kind = h_kind_from_string(get_or<std::string>(j, "kind", "linear"));
  h.a = get_or(j, "a", 1.0);
  h.b = get_or(j, "b", 1.0);
  h.c = get_or(j, "c", 0.0);
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && key != "a" && key != "b" && key != "c") {
      throw ValidationError("unknown key 'h." + key + "'");
    }
  }
  h.validate();
  return h;
}

json params_to_json(const FitParams& p) {
  json j = {{"percent", p.percent},
            {"alpha", p.lodog.alpha},
            {"h", h_to_json(p.lodog.h)},
            {"metric", to_string(p.metric)}};
  j["n_max"] = p.lodog.n_max ? json(*p.lodog.n_max) : json(nullptr);
  return j;
}

FitParams params_from_json(const json& j, FitParams p) {
  p.percent = get_or(j, "percent", p.percent);
  p.lodog.alpha = get_or(j, "alpha", p.lodog.alpha);
  if (j.contains("h")) p.lodog.h = h_from_json(j.at("h"));
  if (j.contains("n_max") && !j.at("n_max").is_null()) {
    p.lodog.n_max = j.at("n_max").get<std::size_t>();
  }
  p.metric = metric_from_string(get_or<std::string>(j, "metric", to_string(p.metric)));
  p.validate();
  return p;
}

template <typename Fn>
decltype(auto) guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

Config default_config() {
  Config c;
  c.fit.percent = 2.0;
  c.fit.lodog.alpha = 0.5;
  c.fit.lodog.h = HSpec::linear(0.1);
  c.schema.label_column = "label";
  c.schema.pop_column = "pop";
  return c;
}

Config parse_config(std::istream& in) {
  return guarded("invalid config", [&] {
    const json j = json::parse(in);
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    static const std::set<std::string> known = {
        "percent", "alpha", "h", "n_max", "metric", "mode", "label_column", "truth_column",
        "pop_column", "feature_columns", "classes", "seed"};
    for (const auto& [key, value] : j.items()) {
      if (!known.contains(key)) throw ValidationError("unknown config key '" + key + "'");
    }
    Config c = default_config();
    c.fit = params_from_json(j, c.fit);
    c.schema.mode = task_mode_from_string(get_or<std::string>(j, "mode", "classification"));
    if (j.contains("label_column")) c.schema.label_column = optional_string(j, "label_column");
    c.schema.truth_column = optional_string(j, "truth_column");
    if (j.contains("pop_column")) c.schema.pop_column = optional_string(j, "pop_column");
    c.schema.feature_columns =
        get_or<std::vector<std::string>>(j, "feature_columns", c.schema.feature_columns);
    c.schema.classes = get_or<std::vector<std::string>>(j, "classes", c.schema.classes);
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    return c;
  });
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  return parse_config(in);
}

std::string config_to_json(const Config& c) {
  json j = params_to_json(c.fit);
  j["mode"] = to_string(c.schema.mode);
  j["label_column"] = c.schema.label_column ? json(*c.schema.label_column) : json(nullptr);
  j["truth_column"] = c.schema.truth_column ? json(*c.schema.truth_column) : json(nullptr);
  j["pop_column"] = c.schema.pop_column ? json(*c.schema.pop_column) : json(nullptr);
  j["feature_columns"] = c.schema.feature_columns;
  j["classes"] = c.schema.classes;
  j["seed"] = c.seed;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Model

void save_model(std::ostream& out, const Model& m) {
  const auto& d = m.data;
  json features = json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto row = d.features.row(i);
    features.push_back(std::vector<double>(row.begin(), row.end()));
  }
  json labels = json::array();
  for (const auto& l : d.label) labels.push_back(l ? json(*l) : json(nullptr));

  auto signed_parents = [](const std::vector<std::size_t>& parents) {
    std::vector<long long> out;
    out.reserve(parents.size());
    for (std::size_t p : parents) out.push_back(p == kNoParent ? -1 : static_cast<long long>(p));
    return out;
  };

  json j;
  j["format"] = "lapoleaf-model";
  j["version"] = kModelFormatVersion;
  j["params"] = params_to_json(m.params);
  j["d_c"] = m.d_c;
  j["mode"] = to_string(d.mode);
  j["classes"] = d.class_names;
  j["dataset"] = {{"features", features}, {"pop", d.pop}, {"label", labels}};
  j["tree"] = {{"rho", m.tree.rho},
               {"delta", m.tree.delta},
               {"gamma", m.tree.gamma},
               {"ln", signed_parents(m.tree.ln)},
               {"root", m.tree.root}};
  j["forest"] = {{"ng_star", m.curve.ng_star},
                 {"roots", m.forest.roots},
                 {"subtree_id", m.forest.subtree_id},
                 {"layer", m.forest.layer}};
  out << j.dump() << '\n';
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  save_model(out, model);
}

Model load_model(std::istream& in) {
  return guarded("invalid model file", [&] {
    const json j = json::parse(in);
    if (j.value("format", "") != "lapoleaf-model") {
      throw ValidationError("not a lapoleaf model file");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw ValidationError("unsupported model version " + j.at("version").dump());
    }
    Dataset data;
    data.mode = task_mode_from_string(j.at("mode").get<std::string>());
    data.class_names = j.at("classes").get<std::vector<std::string>>();
    const auto& jd = j.at("dataset");
    const auto pops = jd.at("pop").get<std::vector<std::size_t>>();
    const auto& labels = jd.at("label");
    const auto& features = jd.at("features");
    if (pops.size() != features.size() || labels.size() != features.size()) {
      throw ValidationError("dataset arrays disagree in length");
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
      const auto x = features[i].get<std::vector<double>>();
      std::optional<double> l;
      if (!labels[i].is_null()) l = labels[i].get<double>();
      data.append(x, pops[i], l);
    }
    const FitParams params = params_from_json(j.at("params"), FitParams{});
    Model m = fit_with_cutoff(std::move(data), params, j.at("d_c").get<double>());

    const auto& jt = j.at("tree");
    std::vector<std::size_t> ln;
    for (long long p : jt.at("ln").get<std::vector<long long>>()) {
      ln.push_back(p < 0 ? kNoParent : static_cast<std::size_t>(p));
    }
    const auto rho = jt.at("rho").get<std::vector<double>>();
    bool same = ln == m.tree.ln && jt.at("root").get<std::size_t>() == m.tree.root &&
                rho.size() == m.tree.rho.size();
    for (std::size_t i = 0; same && i < rho.size(); ++i) {
      same = std::abs(rho[i] - m.tree.rho[i]) <= 1e-9 * std::max(1.0, std::abs(rho[i]));
    }
    const auto& jf = j.at("forest");
    same = same && jf.at("roots").get<std::vector<std::size_t>>() == m.forest.roots &&
           jf.at("subtree_id").get<std::vector<std::size_t>>() == m.forest.subtree_id;
    if (!same) throw ValidationError("model file is inconsistent with its dataset");
    return m;
  });
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model '" + path.string() + "'");
  return load_model(in);
}

// ---------------------------------------------------------------------------
// Predictions

std::string format_label(const Dataset& data, double value) {
  if (data.mode == TaskMode::classification) {
    return data.class_names.at(static_cast<std::size_t>(value));
  }
  std::ostringstream s;
  s.precision(17);
  s << value;
  return s.str();
}

void write_predictions_csv(std::ostream& out, const Predictions& pred, const Dataset& data,
                           std::span<const std::size_t> rows, std::size_t first_index) {
  std::ostringstream s;
  s.precision(17);
  if (pred.mode == TaskMode::classification) {
    s << "index,label";
    for (const auto& name : data.class_names) s << ",score_" << name;
  } else {
    s << "index,value";
  }
  s << '\n';
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    s << first_index + k << ',' << format_label(data, pred.value[r]);
    if (pred.mode == TaskMode::classification) {
      for (double v : pred.scores.row(r)) s << ',' << v;
    }
    s << '\n';
  }
  out << s.str();
}

}  // namespace lapoleaf
