#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "cspde/config.hpp"
#include "cspde/cylindrical.hpp"
#include "cspde/drift.hpp"
#include "cspde/experiments.hpp"
#include "cspde/kolmogorov.hpp"
#include "cspde/numerics.hpp"
#include "cspde/parallel.hpp"
#include "cspde/solver.hpp"
#include "cspde/spectral.hpp"

namespace py = pybind11;
using namespace cspde;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

State to_state(const Array& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  return State(std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const State& x) {
  Array out(static_cast<py::ssize_t>(x.size()));
  std::copy(x.coeffs.begin(), x.coeffs.end(), out.mutable_data());
  return out;
}

Model parse_model(const std::string& s) {
  if (s == "burgers1d") return Model::Burgers1D;
  if (s == "cahn_hilliard3d") return Model::CahnHilliard3D;
  throw std::invalid_argument("unknown model '" + s + "'");
}

NoiseRule parse_noise(const std::string& s) {
  if (s == "cylindrical") return NoiseRule::Cylindrical;
  if (s == "inverse_square") return NoiseRule::InverseSquare;
  throw std::invalid_argument("unknown noise rule '" + s + "'");
}

py::tuple estimate(const MCEstimate& e) { return py::make_tuple(e.value, e.std_error); }

py::dict result_dict(const ExperimentResult& r) {
  py::dict tables;
  for (const auto& t : r.tables) {
    py::dict d;
    d["columns"] = t.columns;
    d["rows"] = t.rows;
    if (!t.label_column.empty()) {
      d["label_column"] = t.label_column;
      d["labels"] = t.labels;
    }
    tables[py::str(t.file)] = d;
  }
  py::dict out;
  out["experiment"] = r.name;
  out["seed"] = r.seed;
  out["passed"] = r.verdict.pass;
  out["statistic"] = r.verdict.statistic;
  out["value"] = r.verdict.value;
  out["threshold"] = r.verdict.threshold;
  out["detail"] = r.verdict.detail;
  out["tables"] = tables;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral Galerkin SPDE experiments";

  py::class_<Spectrum>(m, "Spectrum")
      .def_property_readonly("modes", &Spectrum::modes)
      .def_property_readonly("grid_points", &Spectrum::grid_points)
      .def_property_readonly("lambdas", [](const Spectrum& s) { return std::vector<double>(s.lambdas().begin(), s.lambdas().end()); })
      .def_property_readonly("noise", [](const Spectrum& s) { return std::vector<double>(s.noise_coeffs().begin(), s.noise_coeffs().end()); })
      .def("__repr__", [](const Spectrum& s) {
        return "<Spectrum " + to_string(s.model()) + " m=" + std::to_string(s.modes()) + ">";
      });

  m.def("make_spectrum", [](const std::string& model, std::size_t modes, std::size_t grid, const std::string& noise) {
        return make_spectrum(parse_model(model), modes, grid, parse_noise(noise));
      },
      py::arg("model"), py::arg("m"), py::arg("grid") = 0, py::arg("noise") = "cylindrical");
  m.def("custom_spectrum", &make_custom_spectrum, py::arg("lambdas"), py::arg("noise"));

  py::class_<ScalarFunction>(m, "ScalarFunction")
      .def(py::init(&ScalarFunction::from_name), py::arg("name"), py::arg("amplitude") = 1.0, py::arg("exponent") = 1.0)
      .def("__call__", &ScalarFunction::operator())
      .def("scaled", &ScalarFunction::scaled)
      .def_property_readonly("name", &ScalarFunction::name);

  py::class_<DriftSpec>(m, "Drift")
      .def_static("zero", &DriftSpec::zero)
      .def_static("constant", [](const Array& z) { return DriftSpec::constant(to_state(z)); })
      .def_static("burgers", &DriftSpec::burgers)
      .def_static("cahn_hilliard", &DriftSpec::cahn_hilliard)
      .def_static("nonlocal_", &DriftSpec::nonlocal)
      .def_static("classical_burgers", &DriftSpec::classical_burgers)
      .def_static("truncated", &DriftSpec::truncated)
      .def_static("sum", &DriftSpec::sum)
      .def_static("smoothed", &DriftSpec::smoothed)
      .def("__call__", [](const DriftSpec& F, const Spectrum& s, const Array& x) { return to_array(F(s, to_state(x))); })
      .def("__repr__", &DriftSpec::describe);

  m.def("qt_variances", &qt_variances, py::arg("spectrum"), py::arg("t"));
  m.def("lambda_op_coeffs", &lambda_op_coeffs, py::arg("spectrum"), py::arg("t"));
  m.def("bound_constants", [] {
    return py::make_tuple(lambda_kernel_constant(), sqrt_lambda_kernel_constant(), smoothing_constant());
  });

  m.def("simulate_path",
        [](const Spectrum& s, const DriftSpec& F, const Array& x0, double dt, double T, std::size_t stride,
           std::uint64_t seed, std::uint64_t stream) {
          SolverConfig cfg;
          cfg.dt = dt;
          cfg.horizon = T;
          cfg.save_stride = stride;
          RngStream rng(seed, stream);
          const PathSample p = simulate_path(s, F, to_state(x0), cfg, rng);
          Array states({static_cast<py::ssize_t>(p.size()), static_cast<py::ssize_t>(p.m)});
          std::copy(p.states.begin(), p.states.end(), states.mutable_data());
          return py::make_tuple(p.times, states, p.failed);
        },
        py::arg("spectrum"), py::arg("drift"), py::arg("x0"), py::arg("dt"), py::arg("T"), py::arg("save_stride") = 1,
        py::arg("seed") = 1, py::arg("stream") = 0);

  m.def("moments",
        [](const Spectrum& s, const DriftSpec& F, const Array& x0, double dt, double T, std::size_t n_paths,
           std::uint64_t seed, double p) {
          SolverConfig cfg;
          cfg.dt = dt;
          cfg.horizon = T;
          const EnsembleStats st = ensemble_statistics(s, F, to_state(x0), cfg, n_paths, seed, p);
          std::vector<py::tuple> rows;
          for (std::size_t i = 0; i < st.times.size(); ++i) {
            const MCEstimate e = st.rows[i].estimate(s.modes());
            rows.push_back(py::make_tuple(st.times[i], e.value, e.std_error));
          }
          return rows;
        },
        py::arg("spectrum"), py::arg("drift"), py::arg("x0"), py::arg("dt"), py::arg("T"), py::arg("n_paths"),
        py::arg("seed") = 1, py::arg("p") = 2.0);

  m.def("ou_eval",
        [](const Spectrum& s, const Array& z, double t, const std::string& f, std::size_t mode, const Array& x,
           std::size_t n, std::uint64_t seed) {
          return estimate(ou_eval(s, to_state(z), t, catalogue_function(f, mode), to_state(x), n, RngStream(seed, 0)));
        },
        py::arg("spectrum"), py::arg("z"), py::arg("t"), py::arg("function"), py::arg("mode"), py::arg("x"),
        py::arg("n_samples"), py::arg("seed") = 1);
  m.def("ou_derivative",
        [](const Spectrum& s, const Array& z, double t, const std::string& f, std::size_t mode, const Array& x,
           const Array& h, std::size_t n, std::uint64_t seed) {
          return estimate(ou_derivative(s, to_state(z), t, catalogue_function(f, mode), to_state(x), to_state(h), n,
                                        RngStream(seed, 0)));
        },
        py::arg("spectrum"), py::arg("z"), py::arg("t"), py::arg("function"), py::arg("mode"), py::arg("x"),
        py::arg("h"), py::arg("n_samples"), py::arg("seed") = 1);
  m.def("resolvent_eval",
        [](const Spectrum& s, const Array& z, double lambda, const std::string& f, std::size_t mode, const Array& x,
           std::size_t n, std::uint64_t seed) {
          const ResolventEstimate r =
              resolvent_eval(s, to_state(z), lambda, catalogue_function(f, mode), to_state(x), n, RngStream(seed, 0));
          return py::make_tuple(r.mc.value, r.mc.std_error, r.quad_error, r.tail_bound);
        },
        py::arg("spectrum"), py::arg("z"), py::arg("lam"), py::arg("function"), py::arg("mode"), py::arg("x"),
        py::arg("n_samples"), py::arg("seed") = 1);

  m.def("experiment_names", &experiment_names);
  m.def("config_reference", &config_reference);
  m.def("emit_config", [](const std::string& text) { return emit_config(parse_config(text)); });
  m.def("run_config",
        [](const std::string& text, py::object seed, py::object out) {
          ExperimentConfig cfg = parse_config(text);
          if (!seed.is_none()) cfg.mc.seed = seed.cast<std::uint64_t>();
          ExperimentResult r;
          {
            py::gil_scoped_release nogil;
            r = run_experiment(cfg);
          }
          if (!out.is_none()) write_artifacts(r, out.cast<std::string>(), cfg.output.precision);
          return result_dict(r);
        },
        py::arg("text"), py::arg("seed") = py::none(), py::arg("out") = py::none());

  m.def("set_worker_count", &set_worker_count, py::arg("n"));
  m.def("worker_count", &worker_count);
}
