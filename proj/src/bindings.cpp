#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "kisim/dense.hpp"
#include "kisim/dynamics.hpp"
#include "kisim/harness.hpp"
#include "kisim/io.hpp"
#include "kisim/observables.hpp"
#include "kisim/state.hpp"
#include "kisim/theory.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

kisim::TraceAverageSpec make_avg(const std::string& mode, int n_samples, kisim::RngSeed seed) {
  kisim::AveragingSpec avg;
  avg.mode = mode;
  avg.n_samples = n_samples;
  avg.seed = seed;
  return kisim::averaging_to_trace_spec(avg, 0);
}

std::string fit_json(const kisim::FitResult& fit) {
  nlohmann::json j{{"regime_fit", kisim::regime_name(fit.regime_fit)},
                   {"tau_fit", fit.tau_fit},
                   {"rmse", fit.rmse},
                   {"tau_exp", fit.tau_exp},
                   {"rmse_exp", fit.rmse_exp},
                   {"tau_gauss", fit.tau_gauss},
                   {"rmse_gauss", fit.rmse_gauss},
                   {"n_points", fit.n_points},
                   {"window", {fit.window_low, fit.window_high}}};
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "kicked Ising chain simulator core";
  m.attr("__version__") = kisim::kVersion;

  py::class_<kisim::KickedIsingParams>(m, "Params")
      .def(py::init([](double j_z, double h_x, double h_z) {
             return kisim::KickedIsingParams{j_z, h_x, h_z};
           }),
           "j_z"_a = 1.0, "h_x"_a = 1.4, "h_z"_a = 0.0)
      .def_readwrite("j_z", &kisim::KickedIsingParams::j_z)
      .def_readwrite("h_x", &kisim::KickedIsingParams::h_x)
      .def_readwrite("h_z", &kisim::KickedIsingParams::h_z)
      .def("__repr__", [](const kisim::KickedIsingParams& p) {
        nlohmann::json j = p;
        return "Params(" + j.dump() + ")";
      });

  py::class_<kisim::TimeSeries>(m, "TimeSeries")
      .def_readonly("times", &kisim::TimeSeries::times)
      .def_readonly("values", &kisim::TimeSeries::values)
      .def_readonly("stderrs", &kisim::TimeSeries::stderrs)
      .def_property_readonly("meta_json",
                             [](const kisim::TimeSeries& s) {
                               nlohmann::json j = s.meta;
                               return j.dump();
                             })
      .def("__len__", [](const kisim::TimeSeries& s) { return s.times.size(); });

  m.def(
      "correlation_series",
      [](const kisim::KickedIsingParams& params, int L, const std::string& observable,
         int t_max, const std::string& mode, int n_samples, kisim::RngSeed seed) {
        py::gil_scoped_release release;
        return kisim::correlation_series(params, kisim::parse_observable(observable, L),
                                         t_max, make_avg(mode, n_samples, seed));
      },
      "params"_a, "L"_a, "observable"_a = "M_x", "t_max"_a = 300, "mode"_a = "stochastic",
      "n_samples"_a = 16, "seed"_a = 0,
      "Infinite-temperature autocorrelation C_A(t); per-site for extensive observables.");

  m.def(
      "fidelity_series",
      [](const kisim::KickedIsingParams& params, int L, double delta, int t_max,
         const std::string& mode, int n_samples, kisim::RngSeed seed, bool symmetrized) {
        py::gil_scoped_release release;
        return kisim::fidelity_series(params, L, delta, t_max,
                                      make_avg(mode, n_samples, seed), symmetrized);
      },
      "params"_a, "L"_a, "delta"_a, "t_max"_a = 300, "mode"_a = "stochastic",
      "n_samples"_a = 16, "seed"_a = 0, "symmetrized"_a = false,
      "Fidelity F(t) between unperturbed and kick-perturbed evolution.");

  m.def("estimate_statistics_json", [](const kisim::TimeSeries& series) {
    return kisim::stats_to_json(kisim::estimate_statistics(series)).dump();
  });

  m.def("fit_decay_json", [](const kisim::TimeSeries& series, int L) {
    return fit_json(kisim::fit_decay(series, L));
  });

  m.def("fidelity_quadratic", &kisim::fidelity_quadratic, "corr"_a, "delta"_a, "t"_a,
        "Quadratic response estimate of F(t) from a correlation series.");

  m.def("d_sigma_x", &kisim::d_sigma_x, "j_z"_a, "h_x"_a);
  m.def("tau_ergodic", &kisim::tau_ergodic, "S_A"_a, "delta"_a);
  m.def("tau_nonergodic", &kisim::tau_nonergodic, "D_A"_a, "delta"_a);
  m.def(
      "delta_from_prime",
      [](double delta_prime, int L) { return kisim::delta_from_prime(delta_prime, L); },
      "delta_prime"_a, "L"_a);
  m.def("perturbative_threshold", &kisim::perturbative_threshold, "S_A"_a, "c_A"_a, "L"_a);

  m.def(
      "theory_report_json",
      [](const kisim::KickedIsingParams& params, int L, double delta_prime,
         std::optional<double> S_A, std::optional<double> c_A) {
        kisim::TheoryRequest request;
        request.params = params;
        request.L = L;
        request.delta_prime = delta_prime;
        request.s_a = S_A;
        request.c_a = c_A;
        return kisim::theory_report(request).dump();
      },
      "params"_a, "L"_a, "delta_prime"_a, "S_A"_a = py::none(), "c_A"_a = py::none());

  m.def(
      "oracle_check",
      [](int L, const kisim::KickedIsingParams& params, double delta, int t_steps) {
        kisim::dense::OracleReport report;
        {
          py::gil_scoped_release release;
          report = kisim::dense::oracle_check(L, params, delta, t_steps);
        }
        return py::dict("dev_state"_a = report.dev_state,
                        "dev_correlation"_a = report.dev_correlation,
                        "dev_fidelity"_a = report.dev_fidelity, "worst"_a = report.worst());
      },
      "L"_a, "params"_a, "delta"_a, "t_steps"_a,
      "Compare the gate simulator against a dense-matrix reference (L <= 8).");

  m.def("write_timeseries_csv", &kisim::io::write_timeseries_csv, "path"_a, "series"_a);
  m.def("read_timeseries_csv", &kisim::io::read_timeseries_csv, "path"_a);
}
