#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lapoleaf/lapoleaf.hpp"

namespace py = pybind11;
using namespace lapoleaf;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

/// A fitted model plus the map from caller rows to merged model rows.
struct PyModel {
  Model model;
  std::vector<std::size_t> row_map;
};

py::array_t<double> to_numpy(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

Dataset dataset_from(const Array& x, const Array& y, TaskMode mode,
                     std::optional<std::size_t> n_classes) {
  if (x.ndim() != 2) throw ValidationError("X must be a 2-d array");
  if (y.ndim() != 1 || y.shape(0) != x.shape(0)) {
    throw ValidationError("y must be 1-d with one entry per row of X");
  }
  const auto n = static_cast<std::size_t>(x.shape(0));
  const auto d = static_cast<std::size_t>(x.shape(1));
  const double* xs = x.data();
  const double* ys = y.data();

  Dataset data;
  data.mode = mode;
  data.features = Matrix(0, d);
  if (mode == TaskMode::classification) {
    std::size_t k = n_classes.value_or(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isnan(ys[i])) continue;
      if (ys[i] < 0 || ys[i] != std::floor(ys[i])) {
        throw ValidationError("class labels must be non-negative integers or NaN");
      }
      if (!n_classes) k = std::max(k, static_cast<std::size_t>(ys[i]) + 1);
    }
    for (std::size_t c = 0; c < k; ++c) data.class_names.push_back(std::to_string(c));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<double> label;
    if (!std::isnan(ys[i])) label = ys[i];
    data.append(std::span<const double>(xs + i * d, d), 1, label);
  }
  return data;
}

PyModel fit_model(const Array& x, const Array& y, const std::string& mode, double percent,
                  double alpha, double h, std::optional<std::size_t> n_max,
                  std::optional<std::size_t> n_classes) {
  auto merged = merge_duplicates(dataset_from(x, y, task_mode_from_string(mode), n_classes));
  FitParams params;
  params.percent = percent;
  params.lodog.alpha = alpha;
  params.lodog.h = HSpec::linear(h);
  params.lodog.n_max = n_max;
  PyModel out{fit(std::move(merged.data), params), std::move(merged.row_map)};
  return out;
}

PyModel wrap(Model model) {
  std::vector<std::size_t> rows(model.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return {std::move(model), std::move(rows)};
}

py::array_t<double> scores_of(const Matrix& scores, const std::vector<std::size_t>& rows) {
  py::array_t<double> out({rows.size(), scores.cols()});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto row = scores.row(rows[k]);
    for (std::size_t c = 0; c < row.size(); ++c) view(k, c) = row[c];
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Semi-supervised labeling over density-based leading trees";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

  py::class_<PyModel>(m, "Model")
      .def_property_readonly("size", [](const PyModel& p) { return p.model.size(); })
      .def_property_readonly("mode", [](const PyModel& p) { return to_string(p.model.data.mode); })
      .def_property_readonly("d_c", [](const PyModel& p) { return p.model.d_c; })
      .def_property_readonly("ng_star", [](const PyModel& p) { return p.model.curve.ng_star; })
      .def_property_readonly("distance_evaluations",
                             [](const PyModel& p) { return p.model.dm.eval_count(); })
      .def_property_readonly("roots", [](const PyModel& p) { return p.model.forest.roots; })
      .def_property_readonly("rho", [](const PyModel& p) { return to_numpy(p.model.tree.rho); })
      .def_property_readonly("delta",
                             [](const PyModel& p) { return to_numpy(p.model.tree.delta); })
      .def_property_readonly("gamma",
                             [](const PyModel& p) { return to_numpy(p.model.tree.gamma); })
      .def_property_readonly(
          "parents",
          [](const PyModel& p) {
            std::vector<long long> out;
            for (std::size_t v : p.model.tree.ln) {
              out.push_back(v == kNoParent ? -1 : static_cast<long long>(v));
            }
            return out;
          },
          "Leading node of every model row, -1 for the tree root.")
      .def_property_readonly(
          "row_map", [](const PyModel& p) { return p.row_map; },
          "Model row holding each row of the fitted X.")
      .def(
          "labels",
          [](const PyModel& p) {
            const auto pred = predictions(p.model);
            std::vector<double> out;
            for (std::size_t r : p.row_map) out.push_back(pred.value[r]);
            return to_numpy(out);
          },
          "Class id or regression value for each row of the fitted X.")
      .def(
          "scores",
          [](const PyModel& p) { return scores_of(predictions(p.model).scores, p.row_map); },
          "Label vectors for each row of the fitted X.")
      .def(
          "predict_new",
          [](PyModel& p, const Array& x) {
            if (x.ndim() != 1) throw ValidationError("x must be a 1-d array");
            const auto out = predict_new(
                p.model, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
            return py::make_tuple(out.value, to_numpy(out.scores), out.row, out.merged);
          },
          py::arg("x"),
          "Inserts x and returns (value, scores, row, merged).")
      .def(
          "save", [](const PyModel& p, const std::filesystem::path& path) {
            save_model(path, p.model);
          },
          py::arg("path"))
      .def_static(
          "load", [](const std::filesystem::path& path) { return wrap(load_model(path)); },
          py::arg("path"));

  m.def("fit", &fit_model, py::arg("X"), py::arg("y"), py::kw_only(),
        py::arg("mode") = "classification", py::arg("percent") = 2.0, py::arg("alpha") = 0.5,
        py::arg("h") = 0.1, py::arg("n_max") = py::none(), py::arg("n_classes") = py::none(),
        "Fits a model. NaN in y marks an unlabeled row; duplicate rows of X are merged.");

  m.def(
      "two_blobs",
      [](std::size_t n, double separation, std::uint64_t seed) {
        const auto s = synthetic::two_blobs(n, separation, seed);
        py::array_t<double> x({n, s.data.dims()});
        const auto& values = s.data.features.values();
        std::copy(values.begin(), values.end(), x.mutable_data());
        return py::make_tuple(x, to_numpy(s.truth));
      },
      py::arg("n"), py::arg("separation") = 4.0, py::arg("seed") = 0,
      "Two unit Gaussian blobs; returns (X, truth).");
}
