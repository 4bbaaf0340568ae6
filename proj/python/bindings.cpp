// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cfmimo/channel.hpp"
#include "cfmimo/closedform.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/harness.hpp"
#include "cfmimo/numerics.hpp"
#include "cfmimo/receive.hpp"
#include "cfmimo/scenario.hpp"
#include "cfmimo/wmmse.hpp"

namespace py = pybind11;
using namespace cfmimo;

namespace {

SystemConfig config_from_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

// Per-UE SE of the scaled-identity precoders.
std::vector<double> baseline_se(const SystemModel& model, const std::string& path,
                                CombinerKind combiner, int n_r, std::uint64_t seed) {
  const auto f = scaled_identity_precoders(model.cfg);
  std::vector<double> out;
  if (path == "closed") {
    const ClosedFormContext ctx(model);
    for (int k = 0; k < model.k(); ++k) out.push_back(closed_se_lsfd(ctx, f, k).se);
    return out;
  }
  if (path != "mc") throw ConfigError("path must be 'closed' or 'mc'");
  const DecodeStatistics st = mc_decode_stats(model, f, combiner, n_r, seed);
  for (int k = 0; k < model.k(); ++k)
    out.push_back(optimal_se(st, f[k], model.cfg.sigma2, model.tau_p(), model.cfg.tau_c, k));
  return out;
}

py::dict optimize(const SystemModel& model, int i_max, double epsilon) {
  const ClosedFormContext ctx(model);
  ClosedFormProvider provider(ctx);
  const OptimizerState st =
      iwmmse_run(model, WeightedProblem::from_config(model.cfg), provider, i_max, epsilon);
  py::list se;
  for (const auto& rec : st.records) se.append(rec.se);
  py::dict d;
  d["precoders"] = st.f_u;
  d["wsr"] = st.wsr_trace;
  d["se"] = se;
  d["iterations"] = st.iteration;
  return d;
}

py::list rows_of(const SweepResult& r) {
  py::list out;
  for (const GridPoint& gp : r.points) {
    for (const SeRow& row : gp.result.rows) {
      py::dict d;
      d["value"] = gp.value;
      d["drop_seed"] = row.drop_seed;
      d["l"] = row.l;
      d["n"] = row.n;
      d["combiner"] = std::string(to_string(row.combiner));
      d["precoder_mode"] = std::string(to_string(row.precoder_mode));
      d["se_path"] = std::string(to_string(row.se_path));
      d["iteration"] = row.iteration;
      d["ue_id"] = row.ue_id;
      d["se_bits_per_hz"] = row.se;
      d["sum_se"] = row.sum_se;
      d["wsr"] = row.wsr;
      out.append(d);
    }
  }
  return out;
}

std::string results_csv(const SweepResult& r) {
  std::ostringstream s;
  write_results_csv(s, r);
  return s.str();
}

}  // namespace

PYBIND11_MODULE(_cfmimo, m) {
  m.doc() = "Uplink cell-free MIMO spectral efficiency and precoder optimization";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericsError>(m, "NumericsError", base.ptr());

  py::enum_<CombinerKind>(m, "Combiner")
      .value("mr", CombinerKind::mr)
      .value("lmmse", CombinerKind::lmmse);

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("m", &SystemConfig::m)
      .def_readwrite("k", &SystemConfig::k)
      .def_readwrite("l", &SystemConfig::l)
      .def_readwrite("n", &SystemConfig::n)
      .def_readwrite("area_side", &SystemConfig::area_side)
      .def_readwrite("tau_c", &SystemConfig::tau_c)
      .def_readwrite("tau_p", &SystemConfig::tau_p)
      .def_readwrite("sigma2", &SystemConfig::sigma2)
      .def_readwrite("p", &SystemConfig::p)
      .def_readwrite("mu", &SystemConfig::mu)
      .def_readwrite("n_r", &SystemConfig::n_r)
      .def_readwrite("i_max", &SystemConfig::i_max)
      .def_readwrite("epsilon", &SystemConfig::epsilon)
      .def_readwrite("seeds", &SystemConfig::seeds)
      .def_readwrite("common_random_numbers", &SystemConfig::common_random_numbers)
      .def_readwrite("workers", &SystemConfig::workers)
      .def_property(
          "combiner", [](const SystemConfig& c) { return std::string(to_string(c.combiner)); },
          [](SystemConfig& c, const std::string& v) { c.combiner = parse_combiner(v); })
      .def_property(
          "precoder_mode",
          [](const SystemConfig& c) { return std::string(to_string(c.precoder_mode)); },
          [](SystemConfig& c, const std::string& v) { c.precoder_mode = parse_precoder_mode(v); })
      .def_property(
          "se_path", [](const SystemConfig& c) { return std::string(to_string(c.se_path)); },
          [](SystemConfig& c, const std::string& v) { c.se_path = parse_se_path(v); })
      .def("pilot_length", &SystemConfig::pilot_length)
      .def("validate", &SystemConfig::validate)
      .def("set", [](SystemConfig& c, const std::string& key, const std::string& value) {
        set_config_value(c, key, value);
      })
      .def("__str__", &format_config);

  m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));
  m.def("config_from_string", &config_from_string, py::arg("text"));

  py::class_<SystemModel>(m, "SystemModel")
      .def_property_readonly("m", &SystemModel::m)
      .def_property_readonly("k", &SystemModel::k)
      .def_property_readonly("l", &SystemModel::l)
      .def_property_readonly("n", &SystemModel::n)
      .def_property_readonly("tau_p", &SystemModel::tau_p)
      .def_property_readonly("pilot_group", [](const SystemModel& s) { return s.plan.group; })
      .def("r", [](const SystemModel& s, int ap, int ue) { return CMat(s.r(ap, ue)); })
      .def("r_hat", [](const SystemModel& s, int ap, int ue) {
        return CMat(s.est.r_hat.at(s.est.index(ap, ue)));
      })
      .def("error_covariance", [](const SystemModel& s, int ap, int ue) {
        return CMat(s.est.c.at(s.est.index(ap, ue)));
      })
      .def("beta", [](const SystemModel& s, int ap, int ue) { return s.net.pair(ap, ue).beta; });

  m.def("build_model", py::overload_cast<const SystemConfig&, std::uint64_t>(&build_model),
        py::arg("config"), py::arg("seed"), "Drop, correlation and pilot statistics for one seed.");
  m.def("baseline_se", &baseline_se, py::arg("model"), py::arg("path") = "closed",
        py::arg("combiner") = CombinerKind::mr, py::arg("n_r") = 1000, py::arg("seed") = 1,
        "Per-UE SE with scaled-identity precoders.");
  m.def("optimize", &optimize, py::arg("model"), py::arg("i_max") = 20,
        py::arg("epsilon") = 5e-4, "I-WMMSE on the closed-form MR path.");

  m.def(
      "run_drop",
      [](const SystemConfig& cfg, std::uint64_t seed) {
        SweepResult r;
        GridPoint gp;
        gp.value = cfg.l;
        gp.drop_seed = seed;
        gp.result = run_drop(cfg, seed);
        r.points.push_back(std::move(gp));
        return rows_of(r);
      },
      py::arg("config"), py::arg("seed"));
  m.def(
      "sweep",
      [](const SystemConfig& cfg, const std::string& axis, const std::vector<int>& values) {
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = sweep(cfg, parse_axis(axis), values);
        }
        py::dict d;
        d["rows"] = rows_of(r);
        d["csv"] = results_csv(r);
        d["warnings"] = r.warnings;
        return d;
      },
      py::arg("config"), py::arg("axis"), py::arg("values"));

  m.def("hermitian_sqrt", &hermitian_sqrt, py::arg("a"));
  m.def("large_scale_fading", &large_scale_fading, py::arg("distance"), py::arg("shadow") = 0.0);
}
