#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "urnclt/cli.hpp"
#include "urnclt/limits.hpp"
#include "urnclt/model_io.hpp"
#include "urnclt/montecarlo.hpp"

namespace py = pybind11;
using namespace urnclt;

namespace {

std::vector<std::int64_t> as_checkpoints(const std::vector<std::int64_t>& pts) {
  return pts;
}

EnsembleConfig make_config(std::int64_t paths, std::int64_t horizon,
                           const std::vector<std::int64_t>& checkpoints,
                           std::uint64_t seed, int workers) {
  EnsembleConfig cfg;
  cfg.paths = paths;
  cfg.horizon = horizon;
  cfg.checkpoints = checkpoints;
  cfg.base_seed = seed;
  cfg.workers = workers;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "multicolor urn CLT simulation and verification core";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.exit_code() == 2)
        PyErr_SetString(PyExc_ValueError, e.what());
      else
        PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  py::class_<ModelFile>(m, "Model")
      .def_static("from_json", [](const std::string& text) {
        return parse_model_json(text);
      }, py::arg("text"))
      .def_static("from_file", [](const std::string& path) {
        return load_model_file(path);
      }, py::arg("path"))
      .def_property_readonly("colors",
                             [](const ModelFile& mf) { return mf.model.colors(); })
      .def_property_readonly("hash", [](const ModelFile& mf) { return mf.hash; })
      .def_property_readonly("mode", [](const ModelFile& mf) { return mf.mode; })
      .def_property_readonly("canonical_json",
                             [](const ModelFile& mf) { return mf.canonical_json; })
      .def_property_readonly("pi", [](const ModelFile& mf) { return mf.model.pi.values(); })
      .def_property_readonly("labels", [](const ModelFile& mf) {
        return stat_labels(mf.model);
      })
      .def("__repr__", [](const ModelFile& mf) {
        return "<urnclt.Model " + std::to_string(mf.model.colors()) + " colors, " +
               mf.mode + ", " + mf.hash + ">";
      });

  m.def("spectrum_json", [](const ModelFile& mf) {
    return spectrum_json(mf.model, mf.hash, mf.mode);
  }, py::arg("model"), "eigenstructure, regimes, and pi as a JSON string");

  m.def("limits_json", [](const ModelFile& mf, std::int64_t cross_horizon) {
    return limits_json(limit_covariance(mf.model, cross_horizon), mf.hash);
  }, py::arg("model"), py::arg("cross_horizon") = 1'000'000,
     "regime limit covariances as a JSON string");

  m.def("simulate",
        [](const ModelFile& mf, std::int64_t horizon,
           std::vector<std::int64_t> checkpoints, std::uint64_t seed) {
          auto traj = simulate(mf.model, horizon, as_checkpoints(checkpoints), seed);
          py::list rows;
          for (std::size_t i = 0; i < traj.checkpoints.size(); ++i) {
            py::dict row;
            row["n"] = traj.checkpoints[i];
            row["w"] = traj.states[i];
            rows.append(row);
          }
          return rows;
        },
        py::arg("model"), py::arg("horizon"), py::arg("checkpoints"),
        py::arg("seed") = 42, "single-path urn states at the checkpoints");

  m.def("normalized_statistics",
        [](const ModelFile& mf, std::int64_t horizon,
           std::vector<std::int64_t> checkpoints, std::uint64_t seed) {
          auto traj = simulate(mf.model, horizon, as_checkpoints(checkpoints), seed);
          py::list rows;
          for (std::size_t i = 0; i < traj.checkpoints.size(); ++i) {
            py::dict row;
            row["n"] = traj.checkpoints[i];
            row["stats"] = normalized_statistics(mf.model, traj, traj.checkpoints[i]);
            rows.append(row);
          }
          return rows;
        },
        py::arg("model"), py::arg("horizon"), py::arg("checkpoints"),
        py::arg("seed") = 42,
        "per-checkpoint regime-normalized statistics of one path");

  m.def("verify_json",
        [](const ModelFile& mf, std::int64_t paths, std::int64_t horizon,
           std::vector<std::int64_t> checkpoints, std::uint64_t seed, int workers,
           std::int64_t cross_horizon, double strong_law_delta, int oracle_states) {
          auto cfg = make_config(paths, horizon, checkpoints, seed, workers);
          VerifyOptions opt;
          opt.cross_horizon = cross_horizon;
          opt.strong_law_delta = strong_law_delta;
          opt.oracle_states = oracle_states;
          VerificationReport rep;
          {
            py::gil_scoped_release release;
            rep = verify(mf.model, cfg, opt);
          }
          return report_json(rep);
        },
        py::arg("model"), py::arg("paths") = 10'000, py::arg("horizon") = 100'000,
        py::arg("checkpoints") = std::vector<std::int64_t>{1'000, 10'000, 100'000},
        py::arg("seed") = 42, py::arg("workers") = 0,
        py::arg("cross_horizon") = 1'000'000, py::arg("strong_law_delta") = 0.05,
        py::arg("oracle_states") = 200,
        "full CLT verification report as a JSON string");
}
