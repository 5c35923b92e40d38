// Python bindings for the core estimation and testing routines.
#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qspec/gof.hpp"
#include "qspec/indicator.hpp"
#include "qspec/lag_window.hpp"
#include "qspec/null_models.hpp"
#include "qspec/qsd.hpp"
#include "qspec/sim_harness.hpp"
#include "qspec/stats.hpp"
#include "qspec/two_sample.hpp"
#include "qspec/wishart.hpp"

namespace py = pybind11;
using namespace qspec;

namespace {

Series make_series(py::array_t<double, py::array::c_style | py::array::forcecast> x,
                   const std::string& name) {
  Series s;
  s.name = name;
  s.values.assign(x.data(), x.data() + x.size());
  return s;
}

py::array qsd_values(const QsdEstimate& est) {
  // (q, q, T) complex array, a copy of the estimate's storage.
  const auto c = static_cast<py::ssize_t>(sizeof(std::complex<double>));
  py::array_t<std::complex<double>> out(
      {static_cast<py::ssize_t>(est.q), static_cast<py::ssize_t>(est.q),
       static_cast<py::ssize_t>(est.T)},
      {static_cast<py::ssize_t>(est.q) * est.T * c, static_cast<py::ssize_t>(est.T) * c,
       c});
  std::copy(est.values.begin(), est.values.end(), out.mutable_data());
  return out;
}

py::dict report_dict(const TestReport& rep) {
  py::dict d;
  d["test"] = rep.test_name;
  d["statistic"] = rep.statistic;
  d["E_T"] = rep.E_T;
  d["V_T"] = rep.V_T;
  d["z"] = rep.z;
  d["p_normal"] = rep.p_normal;
  if (rep.p_bootstrap) {
    d["p_bootstrap"] = *rep.p_bootstrap;
    d["bootstrap_reps"] = rep.bootstrap_reps;
  }
  py::object loads = py::module_::import("json").attr("loads");
  d["settings"] = loads(rep.settings.dump());
  return d;
}

LagWindowSpec window_from(const std::string& kind, int M) {
  if (kind == "bartlett") return LagWindowSpec::bartlett(M);
  if (kind == "truncated") return LagWindowSpec::truncated(M);
  throw std::invalid_argument("window must be 'bartlett' or 'truncated'");
}

NullModel model_from(const py::object& spec) {
  if (py::isinstance<py::str>(spec)) return NullModel::preset(spec.cast<std::string>());
  if (py::isinstance<NullModel>(spec)) return spec.cast<NullModel>();
  py::object dumps = py::module_::import("json").attr("dumps");
  return NullModel::from_json(
      nlohmann::json::parse(dumps(spec).cast<std::string>()));
}

}  // namespace

PYBIND11_MODULE(_qspec, m) {
  m.doc() = "Quantile spectral density estimation and hypothesis tests";

  py::class_<NullModel>(m, "NullModel")
      .def_static("iid", &NullModel::iid, py::arg("mu"), py::arg("sigma"))
      .def_static("ar1", &NullModel::ar1, py::arg("mu"), py::arg("a"),
                  py::arg("sigma_eps"))
      .def_static("arch1", &NullModel::arch1, py::arg("mu"), py::arg("a0"),
                  py::arg("a1"))
      .def_static("garch11", &NullModel::garch11, py::arg("mu"), py::arg("a0"),
                  py::arg("a1"), py::arg("b"))
      .def_static("squared_arch1", &NullModel::squared_arch1, py::arg("a0"),
                  py::arg("a"))
      .def_static("preset", &NullModel::preset, py::arg("name"))
      .def("__repr__",
           [](const NullModel& mdl) { return "NullModel(" + mdl.to_json().dump() + ")"; });

  py::class_<QsdEstimate>(m, "QsdEstimate")
      .def_readonly("q", &QsdEstimate::q)
      .def_readonly("T", &QsdEstimate::T)
      .def_property_readonly("thresholds",
                             [](const QsdEstimate& e) { return e.grid.thresholds; })
      .def_property_readonly("levels",
                             [](const QsdEstimate& e) { return e.grid.levels; })
      .def_property_readonly("values", &qsd_values)
      .def("omega", &QsdEstimate::omega, py::arg("k"))
      .def(
          "confidence_band",
          [](const QsdEstimate& e, int i, int j, int k, double alpha) {
            ConfidenceBand b = confidence_band(e, i, j, k, alpha);
            return py::make_tuple(py::make_tuple(b.re_lo, b.re_hi),
                                  py::make_tuple(b.im_lo, b.im_hi));
          },
          py::arg("i"), py::arg("j"), py::arg("k"), py::arg("alpha") = 0.05,
          "Pointwise ((re_lo, re_hi), (im_lo, im_hi)) band at 1 - alpha.");

  m.def("default_levels", &default_levels,
        "The default quantile levels 0.05, 0.10, ..., 0.95.");

  m.def(
      "simulate",
      [](const py::object& model, int T, std::uint64_t seed) {
        Series s = simulate(model_from(model), T, seed);
        const auto n = static_cast<py::ssize_t>(s.values.size());
        py::array_t<double> out({n}, {static_cast<py::ssize_t>(sizeof(double))});
        std::copy(s.values.begin(), s.values.end(), out.mutable_data());
        return out;
      },
      py::arg("model"), py::arg("T"), py::arg("seed"),
      "Simulate a path of the model (preset name, NullModel, or dict).");

  m.def(
      "estimate",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> x,
         const std::string& window, int M, std::optional<std::vector<double>> levels,
         bool copula) {
        Series s = make_series(x, "series");
        auto lv = levels.value_or(default_levels());
        auto w = window_from(window, M);
        return copula ? estimate_copula_qsd(s, lv, w)
                      : estimate_qsd(s, empirical_grid(s, lv), w);
      },
      py::arg("x"), py::arg("window") = "bartlett", py::arg("M") = 16,
      py::arg("levels") = std::nullopt, py::arg("copula") = false,
      "Lag-window quantile spectral density estimate on the empirical grid.");

  m.def(
      "gof_test",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> x,
         const py::object& model, const std::string& window, int M,
         std::optional<std::vector<double>> levels, int bootstrap,
         std::uint64_t seed, long long mc_paths) {
        Series s = make_series(x, "series");
        auto w = window_from(window, M);
        McConfig mc;
        mc.N = mc_paths;
        auto tables =
            null_tables(model_from(model), levels.value_or(default_levels()), M, mc);
        GofOptions opt;
        opt.bootstrap_reps = bootstrap;
        opt.seed = seed;
        return report_dict(gof_test(s, tables, w, opt));
      },
      py::arg("x"), py::arg("model"), py::arg("window") = "bartlett",
      py::arg("M") = 16, py::arg("levels") = std::nullopt,
      py::arg("bootstrap") = 0, py::arg("seed") = 0,
      py::arg("mc_paths") = 1000000LL,
      "Goodness-of-fit test of the series against a null model.");

  m.def(
      "two_sample_test",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> xa,
         py::array_t<double, py::array::c_style | py::array::forcecast> xb,
         const std::string& window, int M, std::optional<std::vector<double>> levels,
         int bootstrap, std::uint64_t seed) {
        Series a = make_series(xa, "a"), b = make_series(xb, "b");
        TwoSampleOptions opt;
        opt.bootstrap_reps = bootstrap;
        opt.seed = seed;
        return report_dict(two_sample_test(a, b, levels.value_or(default_levels()),
                                           window_from(window, M), opt));
      },
      py::arg("a"), py::arg("b"), py::arg("window") = "bartlett", py::arg("M") = 16,
      py::arg("levels") = std::nullopt, py::arg("bootstrap") = 0, py::arg("seed") = 0,
      "Equality of serial dependence structure between two series.");

  m.def(
      "reversibility_test",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> x,
         const std::string& window, int M, std::optional<std::vector<double>> levels,
         int bootstrap, std::uint64_t seed) {
        Series s = make_series(x, "series");
        return report_dict(reversibility_test(s, levels.value_or(default_levels()),
                                              window_from(window, M), bootstrap, seed));
      },
      py::arg("x"), py::arg("window") = "bartlett", py::arg("M") = 16,
      py::arg("levels") = std::nullopt, py::arg("bootstrap") = 500, py::arg("seed") = 0,
      "Time-reversibility test (bootstrap reference distribution).");
}
