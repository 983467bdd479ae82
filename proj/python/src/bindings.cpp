#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "ppl/error.hpp"
#include "ppl/harness.hpp"
#include "ppl/kernel.hpp"
#include "ppl/models.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ppl::Window to_window(const std::vector<double>& w) {
  if (w.size() != 4) throw ppl::ValidationError("window must be (x_min, x_max, y_min, y_max)");
  return {w[0], w[1], w[2], w[3]};
}

ppl::PointPattern to_pattern(const Array& points, const ppl::Window& w) {
  if (points.ndim() != 2 || points.shape(1) != 2) {
    throw ppl::ValidationError("points must be an (n, 2) array");
  }
  auto r = points.unchecked<2>();
  std::vector<ppl::Point> pts;
  pts.reserve(std::size_t(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) pts.push_back({r(i, 0), r(i, 1)});
  return {std::move(pts), w};
}

Array to_array(const ppl::PointPattern& x) {
  Array out({py::ssize_t(x.size()), py::ssize_t(2)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < x.size(); ++i) {
    m(py::ssize_t(i), 0) = x[i].x;
    m(py::ssize_t(i), 1) = x[i].y;
  }
  return out;
}

ppl::FitOptions fit_options(const json& j) {
  ppl::FitOptions o;
  const auto task = j.value("task", std::string("constant"));
  if (task == "constant") {
    o.task = ppl::FitTask::Constant;
  } else if (task == "hardcore") {
    o.task = ppl::FitTask::HardCore;
  } else if (task == "bandwidth") {
    o.task = ppl::FitTask::Bandwidth;
  } else {
    throw ppl::ValidationError("unknown task '" + task + "'");
  }
  if (j.contains("cv")) o.cv = ppl::parse_cv(j.at("cv"));
  o.cv.validate();
  o.seed = j.value("seed", o.seed);
  o.loss = ppl::parse_loss(j.value("loss", std::string("L2")));
  if (j.contains("h")) o.h = ppl::parse_test_function(j.at("h"));
  if (j.contains("f")) o.f = ppl::parse_test_function(j.at("f"));
  const auto selector = j.value("selector", std::string("ppl"));
  if (selector == "ppl") {
    o.selector = ppl::ppl_selector(o.loss);
  } else if (selector == "cvl") {
    o.selector = ppl::BandwidthSelector::CvL;
  } else if (selector == "poisson_lik_cv") {
    o.selector = ppl::BandwidthSelector::PoissonLikCv;
  } else {
    throw ppl::ValidationError("unknown selector '" + selector + "'");
  }
  o.grid_resolution = j.value("grid_resolution", o.grid_resolution);
  o.include_landscape = j.value("landscape", false);
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Point process learning core";

  py::register_exception<ppl::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ppl::ComputationError>(m, "ComputationError", PyExc_RuntimeError);

  m.def(
      "simulate",
      [](const std::string& model_json, std::uint64_t seed) {
        const auto spec = ppl::parse_model(json::parse(model_json));
        const ppl::Model model(spec);
        ppl::PointPattern x;
        {
          py::gil_scoped_release release;
          x = model.simulate(seed);
        }
        return py::make_tuple(to_array(x), std::vector<double>{spec.window.x_min(),
                                                               spec.window.x_max(),
                                                               spec.window.y_min(),
                                                               spec.window.y_max()});
      },
      py::arg("model_json"), py::arg("seed"));

  m.def(
      "fit",
      [](const Array& points, const std::vector<double>& window, const std::string& options) {
        const auto x = to_pattern(points, to_window(window));
        const auto o = fit_options(json::parse(options));
        json out;
        {
          py::gil_scoped_release release;
          out = ppl::run_fit(x, o);
        }
        return out.dump();
      },
      py::arg("points"), py::arg("window"), py::arg("options_json"));

  m.def(
      "run_experiment",
      [](const std::string& config) {
        const auto spec = ppl::parse_experiment(json::parse(config));
        std::ostringstream out;
        {
          py::gil_scoped_release release;
          ppl::write_results_csv(out, ppl::run_experiment(spec));
        }
        return out.str();
      },
      py::arg("config_json"));

  m.def(
      "kernel_surface",
      [](const Array& points, const std::vector<double>& window, double bandwidth,
         std::size_t resolution, bool edge_correction) {
        const auto w = to_window(window);
        const auto x = to_pattern(points, w);
        const ppl::QuadratureGrid grid(w, resolution);
        const auto s = ppl::kernel_surface(
            x, bandwidth, grid, edge_correction ? ppl::EdgeCorrection::Local : ppl::EdgeCorrection::None);
        Array out({py::ssize_t(resolution), py::ssize_t(resolution)});
        std::copy(s.begin(), s.end(), out.mutable_data());
        return out;
      },
      py::arg("points"), py::arg("window"), py::arg("bandwidth"), py::arg("resolution") = 128,
      py::arg("edge_correction") = true);
}
