// Python bindings of the core library and the experiment driver.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "rotmhd/cutoff.hpp"
#include "rotmhd/dispersion.hpp"
#include "rotmhd/errors.hpp"
#include "rotmhd/experiment.hpp"
#include "rotmhd/norms.hpp"
#include "rotmhd/random_field.hpp"
#include "rotmhd/solver.hpp"

namespace py = pybind11;
using namespace rotmhd;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

// (3, n_h, n_h, n_v) complex coefficients, unscaled forward FFT convention.
CArray to_numpy(const SpectralField& f) {
  const Grid& g = f.grid;
  CArray a({std::size_t{3}, std::size_t(g.n_h()), std::size_t(g.n_h()), std::size_t(g.n_v())});
  cplx* out = a.mutable_data();
  for (int c = 0; c < 3; ++c) std::memcpy(out + c * g.size(), f.comp[c].data(), g.size() * sizeof(cplx));
  return a;
}

SpectralField from_numpy(const Grid& g, const CArray& a) {
  if (a.ndim() != 4 || a.shape(0) != 3 || a.shape(1) != g.n_h() || a.shape(2) != g.n_h() ||
      a.shape(3) != g.n_v())
    throw ParameterError("field array must have shape (3, n_h, n_h, n_v)");
  SpectralField f(g);
  for (int c = 0; c < 3; ++c) std::memcpy(f.comp[c].data(), a.data() + c * g.size(), g.size() * sizeof(cplx));
  return f;
}

py::dict record_dict(const DiagnosticsRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["energy"] = r.energy;
  d["h_gradient"] = r.h_gradient;
  d["h0s"] = r.h0s;
  d["dissipation"] = r.dissipation;
  d["energy_residual"] = r.energy_residual;
  d["ltilde_inf"] = r.ltilde_inf;
  d["ltilde_2"] = r.ltilde_2;
  d["tilde_h0s"] = r.tilde_h0s;
  d["blowup"] = r.blowup;
  return d;
}

py::object parse_json(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json to_cpp_json(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Branch branch_of(const std::string& s) {
  if (s == "A") return Branch::A;
  if (s == "B") return Branch::B;
  throw ParameterError("branch must be 'A' or 'B'");
}

}  // namespace

PYBIND11_MODULE(_rotmhd, m) {
  m.doc() = "Rotating anisotropic MHD: spectral solver, linear analysis and dispersion tools";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, int, double, double>(), py::arg("n_h"), py::arg("n_v"),
           py::arg("box_h"), py::arg("box_v"))
      .def_property_readonly("n_h", &Grid::n_h)
      .def_property_readonly("n_v", &Grid::n_v)
      .def_property_readonly("box_h", &Grid::box_h)
      .def_property_readonly("box_v", &Grid::box_v)
      .def_property_readonly("size", &Grid::size);

  py::class_<ModelParams>(m, "ModelParams")
      .def_static("rotating", &ModelParams::rotating, py::arg("eps"), py::arg("alpha"),
                  py::arg("s") = 1.0, py::arg("eta") = 1.0, py::arg("beta") = 1.0)
      .def_static("generic", &ModelParams::generic, py::arg("eps"), py::arg("nu"),
                  py::arg("nu_m"), py::arg("mu"), py::arg("s") = 1.0, py::arg("eta") = 1.0,
                  py::arg("beta") = 1.0)
      .def_readonly("eps", &ModelParams::eps)
      .def_readonly("alpha", &ModelParams::alpha)
      .def_readonly("nu", &ModelParams::nu)
      .def_readonly("nu_m", &ModelParams::nu_m)
      .def_readonly("mu", &ModelParams::mu)
      .def_readonly("s", &ModelParams::s)
      .def_readonly("eta", &ModelParams::eta)
      .def_readonly("beta", &ModelParams::beta);

  py::class_<StateVector>(m, "State")
      .def(py::init([](const Grid& g, const CArray& u, const CArray& b) {
             return StateVector(from_numpy(g, u), from_numpy(g, b));
           }),
           py::arg("grid"), py::arg("u"), py::arg("b"))
      .def_property_readonly("grid", &StateVector::grid)
      .def_property_readonly("u", [](const StateVector& s) { return to_numpy(s.u); })
      .def_property_readonly("b", [](const StateVector& s) { return to_numpy(s.b); });

  m.def(
      "random_state",
      [](const Grid& g, std::uint64_t seed, double k_min, double k_max, double min_h,
         double min_v, double slope, double l2) {
        RandomFieldSpec spec{k_min, k_max, min_h, min_v, slope, l2};
        return random_state(g, spec, seed);
      },
      py::arg("grid"), py::arg("seed"), py::arg("k_min") = 0.0, py::arg("k_max") = 1e300,
      py::arg("min_h") = 0.0, py::arg("min_v") = 0.0, py::arg("slope") = -4.0,
      py::arg("l2") = 1.0, "Seeded divergence-free random velocity and magnetic field.");

  m.def("h0s_norm", py::overload_cast<const StateVector&, double>(&h0s_norm), py::arg("state"),
        py::arg("s"));
  m.def("y_norm", py::overload_cast<const StateVector&, double, double>(&y_norm),
        py::arg("state"), py::arg("s"), py::arg("eta"));

  m.def("assemble_symbol", &assemble_symbol, py::arg("xi"), py::arg("model"));
  m.def("eigenvalues", &eigenvalues, py::arg("xi"), py::arg("model"));
  m.def("eigenvectors", &eigenvectors, py::arg("xi"), py::arg("model"));
  m.def("is_degenerate", &is_degenerate, py::arg("xi"));
  m.def("cramer_det_closed_form", &cramer_det_closed_form, py::arg("xi"));
  m.def("eigen_propagator", &eigen_propagator, py::arg("xi"), py::arg("model"), py::arg("t"));
  m.def(
      "expm_propagator",
      [](const Eigen::MatrixXcd& symbol, double t) {
        if (symbol.rows() != 6 || symbol.cols() != 6) throw ParameterError("symbol must be 6x6");
        return Eigen::MatrixXcd(expm_oracle(Mat6(symbol), t));
      },
      py::arg("symbol"), py::arg("t"));

  m.def("admissible_alpha", &admissible_alpha, py::arg("beta") = 1.0, py::arg("eta") = 1.0,
        py::arg("s") = 1.0);
  m.def(
      "schedule",
      [](double eps, double alpha, double beta, double eta, double s, double constant) {
        const CutoffParams c = schedule_parameters(eps, alpha, beta, eta, s, constant);
        py::dict d;
        d["r"] = c.r;
        d["R"] = c.R;
        d["alpha0"] = c.alpha0;
        d["alpha_admissible"] = c.alpha_admissible;
        d["exponent_low"] = c.exponent_low;
        d["exponent_high"] = c.exponent_high;
        return d;
      },
      py::arg("eps"), py::arg("alpha"), py::arg("beta") = 1.0, py::arg("eta") = 1.0,
      py::arg("s") = 1.0, py::arg("schedule_constant") = 1.0);

  m.def(
      "simulate",
      [](const StateVector& U0, const ModelParams& p, double dt, double t_end, int cadence,
         const std::string& mode, std::optional<std::pair<double, double>> cutoff) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.t_end = t_end;
        cfg.cadence = cadence;
        if (cutoff) cfg.cutoff = CutoffBand{cutoff->first, cutoff->second};
        RunMode rm = RunMode::direct;
        if (mode == "coupled_split") rm = RunMode::coupled_split;
        else if (mode != "direct") throw ParameterError("mode must be 'direct' or 'coupled_split'");
        RunResult res = [&] {
          py::gil_scoped_release release;
          return run(U0, cfg, p, rm);
        }();
        py::list records;
        for (const auto& r : res.records) records.append(record_dict(r));
        py::dict d;
        d["records"] = records;
        d["status"] = res.status;
        d["blowup"] = res.blowup;
        d["t_reached"] = res.t_reached;
        d["sup_tilde_h0s"] = res.sup_tilde_h0s;
        d["final_state"] = res.final_state;
        d["warnings"] = res.warnings;
        return d;
      },
      py::arg("state"), py::arg("model"), py::arg("dt"), py::arg("t_end"),
      py::arg("cadence") = 1, py::arg("mode") = "direct", py::arg("cutoff") = py::none(),
      "Integrate from `state`; `cutoff` is the band (r, R).");

  m.def(
      "kernel_decay",
      [](const std::string& branch, double r, double R, std::vector<double> theta, double beta,
         double tau, int samples, std::uint64_t seed) {
        DecayFitOptions opt;
        opt.theta = std::move(theta);
        opt.tau = tau;
        opt.samples = samples;
        opt.seed = seed;
        DecayFit f = [&] {
          py::gil_scoped_release release;
          return kernel_decay_fit(branch_of(branch), r, R, beta, opt);
        }();
        py::dict d;
        d["theta"] = f.theta;
        d["sup_abs"] = f.sup_abs;
        d["slope"] = f.slope;
        d["window"] = std::make_pair(f.window_lo, f.window_hi);
        d["bound_ratio"] = f.bound_ratio;
        d["accuracy_degraded"] = f.accuracy_degraded;
        return d;
      },
      py::arg("branch"), py::arg("r"), py::arg("R"), py::arg("theta"), py::arg("beta") = 1.0,
      py::arg("tau") = 0.0, py::arg("samples") = 256, py::arg("seed") = 1);

  m.def(
      "strichartz_sweep",
      [](std::vector<double> eps, std::vector<double> p, double alpha, double r, double R,
         int xi3_nodes, int x_samples) {
        StrichartzOptions opt;
        opt.alpha = alpha;
        opt.r = r;
        opt.R = R;
        opt.xi3_nodes = xi3_nodes;
        opt.x_samples = x_samples;
        ScalingSweep sw = [&] {
          py::gil_scoped_release release;
          return strichartz_scaling_sweep(StrichartzProfile{}, eps, p, opt);
        }();
        py::dict d;
        d["eps"] = sw.eps;
        d["p"] = sw.p;
        d["norms"] = sw.norms;
        d["slope"] = sw.slope;
        d["predicted"] = sw.predicted;
        d["accuracy_degraded"] = sw.accuracy_degraded;
        return d;
      },
      py::arg("eps"), py::arg("p"), py::arg("alpha") = 0.0, py::arg("r") = 0.5,
      py::arg("R") = 2.0, py::arg("xi3_nodes") = 24, py::arg("x_samples") = 48);

  m.def(
      "normalize_config",
      [](const py::object& doc) { return parse_json(to_json(parse_config(to_cpp_json(doc)))); },
      py::arg("config"), "Validate a config dict and return it with every default filled in.");

  m.def(
      "run_experiment",
      [](const py::object& doc, const std::filesystem::path& out) {
        const json j = to_cpp_json(doc);
        const ExperimentConfig cfg = parse_config(j);
        RunManifest man = [&] {
          py::gil_scoped_release release;
          return run_experiment(cfg, out, j.dump());
        }();
        py::dict d;
        d["status"] = man.status;
        d["exit_code"] = man.exit_code;
        d["warnings"] = man.warnings;
        d["derived"] = parse_json(man.derived);
        py::list files;
        for (const auto& a : man.artifacts) files.append(a.file);
        d["artifacts"] = files;
        return d;
      },
      py::arg("config"), py::arg("out"),
      "Run a configured experiment into `out`; returns the manifest summary.");

  m.def("git_blob_hash", &git_blob_hash, py::arg("data"));
}
