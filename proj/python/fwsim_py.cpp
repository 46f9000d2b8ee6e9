#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fwsim/atmosphere.hpp"
#include "fwsim/error.hpp"
#include "fwsim/runner.hpp"

namespace py = pybind11;
using namespace fwsim;

namespace {

py::dict seed_set_dict(const TrajectorySeedSet& s) {
  py::dict modules;
  for (std::size_t i = 0; i < kModuleSeedCount; ++i)
    modules[py::str(std::string(kSeedNames[i]))] = s.module_seeds[i];
  py::dict d;
  d["run_index"] = s.run_index;
  d["trajectory_seed"] = s.trajectory_seed;
  d["modules"] = modules;
  return d;
}

py::dict metrics_dict(const TrajectoryMetrics& m) {
  py::dict d;
  d["mean"] = m.mean;
  d["std"] = m.std;
  d["max"] = m.max;
  return d;
}

py::dict run_dict(const RunResult& r) {
  py::dict vars;
  for (std::size_t i = 0; i < kErrorVariableCount; ++i) {
    py::dict v = metrics_dict(r.variables[i].metrics);
    v["final"] = r.variables[i].final_value;
    vars[kErrorVariables[i].name] = v;
  }
  py::dict d;
  d["run_index"] = r.run_index;
  d["seeds"] = seed_set_dict(r.seeds);
  d["ok"] = r.ok;
  d["failure"] = r.failure;
  d["truth_epochs"] = r.truth_epochs;
  d["estimate_epochs"] = r.estimate_epochs;
  d["control_epochs"] = r.control_epochs;
  d["camera_frames"] = r.camera_frames;
  d["gnss_fixes"] = r.gnss_fixes;
  d["ground_distance"] = r.ground_distance;
  d["max_radial_distance"] = r.max_radial_distance;
  d["digest"] = r.digest;
  d["variables"] = vars;
  return d;
}

py::dict spread_dict(const Spread& s) {
  py::dict d;
  d["mean"] = s.mean;
  d["std"] = s.std;
  d["max"] = s.max;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fwsim, m) {
  m.doc() = "Fixed-wing GNSS-denied navigation simulation core";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_property(
          "master_seed", [](const RunConfig& c) { return c.master.value; },
          [](RunConfig& c, std::uint64_t v) { c.master.value = v; })
      .def_readwrite("n_ex", &RunConfig::n_ex)
      .def_readwrite("scenario", &RunConfig::scenario)
      .def_readwrite("zone", &RunConfig::zone)
      .def_readwrite("navigation", &RunConfig::navigation)
      .def_property(
          "integrator", [](const RunConfig& c) { return std::string(to_string(c.integrator)); },
          [](RunConfig& c, const std::string& s) { c.integrator = parse_integrator(s); })
      .def_property(
          "turbulence", [](const RunConfig& c) { return std::string(to_string(c.turbulence)); },
          [](RunConfig& c, const std::string& s) { c.turbulence = parse_turbulence_severity(s); })
      .def_readwrite("sensor_errors", &RunConfig::sensor_errors)
      .def_readwrite("geo_perturbation", &RunConfig::geo_perturbation)
      .def_readwrite("t_end", &RunConfig::t_end)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_readwrite("parallelism", &RunConfig::parallelism)
      .def_readwrite("run_indices", &RunConfig::run_indices)
      .def_readwrite("write_traces", &RunConfig::write_traces)
      .def_property_readonly("config_hash", [](const RunConfig& c) { return config_hash(c); });

  m.def(
      "load_run_config",
      [](const std::filesystem::path& path, const std::vector<std::string>& overrides) {
        return load_run_config(path, overrides);
      },
      py::arg("path"), py::arg("overrides") = std::vector<std::string>{});

  m.def(
      "seed_table",
      [](std::uint64_t master, int n_ex) {
        py::list out;
        for (const auto& s : derive_seed_table({master}, n_ex)) out.append(seed_set_dict(s));
        return out;
      },
      py::arg("master"), py::arg("n_ex"));

  m.def(
      "run_single",
      [](const RunConfig& cfg, int j, bool write_traces) {
        RunOptions opt;
        opt.write_traces = write_traces;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_single(cfg, j, opt);
        }
        return run_dict(r);
      },
      py::arg("config"), py::arg("run_index"), py::arg("write_traces") = false);

  m.def(
      "monte_carlo",
      [](const RunConfig& cfg, bool write_outputs) {
        MonteCarloReport rep;
        {
          py::gil_scoped_release release;
          rep = run_monte_carlo(cfg, write_outputs);
        }
        py::list runs;
        for (const auto& r : rep.runs) runs.append(run_dict(r));
        py::dict vars;
        for (const auto& v : rep.variables) {
          py::dict d;
          d["of_mean"] = spread_dict(v.aggregated.of_mean);
          d["of_std"] = spread_dict(v.aggregated.of_std);
          d["of_max"] = spread_dict(v.aggregated.of_max);
          d["final_mean"] = v.final_state.mean;
          d["final_std"] = v.final_state.std;
          d["final_max"] = v.final_state.max;
          d["drift"] = v.classification.drift;
          d["biased"] = v.classification.biased;
          vars[py::str(v.name)] = d;
        }
        py::dict out;
        out["config_hash"] = rep.config_hash;
        out["runs"] = runs;
        out["failed"] = rep.failed;
        out["variables"] = vars;
        out["report"] = format_report(rep);
        return out;
      },
      py::arg("config"), py::arg("write_outputs") = false);

  m.def(
      "trajectory_metrics",
      [](const std::vector<double>& v) { return metrics_dict(trajectory_metrics(v)); },
      py::arg("series"));

  m.def(
      "aggregate",
      [](const std::vector<std::vector<double>>& per_seed) {
        std::vector<TrajectoryMetrics> per;
        for (const auto& s : per_seed) per.push_back(trajectory_metrics(s));
        const AggregatedMetrics a = aggregate(per);
        py::dict d;
        d["of_mean"] = spread_dict(a.of_mean);
        d["of_std"] = spread_dict(a.of_std);
        d["of_max"] = spread_dict(a.of_max);
        return d;
      },
      py::arg("series"), "Cross-seed statistics of per-seed trajectory metrics.");

  m.def(
      "atmosphere",
      [](double hp, double dT, double dp) {
        const AtmosphericState s = insa_state(hp, dT, dp);
        py::dict d;
        d["T"] = s.T;
        d["p"] = s.p;
        d["rho"] = s.rho;
        d["sound_speed"] = s.sound_speed;
        d["H"] = s.H;
        return d;
      },
      py::arg("hp"), py::arg("dT") = 0.0, py::arg("dp") = 0.0);
}
