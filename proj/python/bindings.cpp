#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gridcross/cbaa.hpp"
#include "gridcross/config.hpp"
#include "gridcross/dynamics.hpp"
#include "gridcross/error.hpp"
#include "gridcross/experiment.hpp"
#include "gridcross/metrics.hpp"
#include "gridcross/qp.hpp"
#include "gridcross/sim.hpp"
#include "gridcross/trace_io.hpp"

namespace py = pybind11;
using namespace gridcross;

namespace {

SimConfig config_from(const py::object& config) {
  if (config.is_none()) return SimConfig::defaults();
  return SimConfig::from_json(py::str(config));
}

Trace trace_from(const std::string& csv) {
  std::istringstream is(csv);
  return read_trace_csv(is);
}

py::dict stats_dict(const RunStats& s) {
  py::dict d;
  d["ticks"] = s.ticks;
  d["injected"] = s.injected;
  d["completed"] = s.completed;
  d["reroutes"] = s.reroutes;
  d["infeasible"] = s.infeasible;
  d["dropped_rows"] = s.dropped_rows;
  d["deadlock_warnings"] = s.deadlock_warnings;
  d["safety_violations"] = s.safety_violations;
  d["max_auction_iterations"] = s.max_auction_iterations;
  d["incomplete"] = s.incomplete;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Grid traffic simulator with consensus auctions and per-vehicle MPC.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidConfiguration>(m, "InvalidConfiguration", base.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());

  m.def("default_config", [] { return SimConfig::defaults().to_json(); },
        "Default configuration as a JSON string.");
  m.def("normalize_config", [](const std::string& text) { return SimConfig::from_json(text).to_json(); },
        py::arg("text"), "Validate a JSON configuration and return it with every key filled in.");

  m.def(
      "run",
      [](const py::object& config, std::optional<std::uint64_t> seed, std::optional<int> target) {
        SimConfig cfg = config_from(config);
        if (seed) cfg.run.seed = *seed;
        if (target) cfg.run.target_completed = *target;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(cfg);
        }
        py::dict out;
        out["trace_csv"] = trace_csv(r.trace);
        out["stats"] = stats_dict(r.stats);
        out["summary_json"] = summary_json(summarize(r.trace, cfg.mpc.min_distance));
        return out;
      },
      py::arg("config") = py::none(), py::arg("seed") = py::none(), py::arg("target") = py::none(),
      "Run one simulation. `config` is a JSON string or None for the defaults.");

  m.def(
      "summarize",
      [](const std::string& csv, double min_distance) { return summary_json(summarize(trace_from(csv), min_distance)); },
      py::arg("trace_csv"), py::arg("min_distance") = 2.1, "Summary statistics of a trace as JSON.");

  m.def(
      "detect_collisions",
      [](const std::string& csv, double min_distance) {
        std::vector<std::tuple<long, int, int, double>> out;
        for (const auto& v : detect_collisions(trace_from(csv), min_distance)) out.emplace_back(v.k, v.a, v.b, v.distance);
        return out;
      },
      py::arg("trace_csv"), py::arg("min_distance") = 2.1, "(k, a, b, distance) for every pair closer than the limit.");

  m.def(
      "compare_turns",
      [](const py::object& config, const std::vector<std::uint64_t>& seeds) {
        const SimConfig cfg = config_from(config);
        TurnComparison c;
        {
          py::gil_scoped_release release;
          c = compare_turns(cfg, seeds);
        }
        return comparison_json(c);
      },
      py::arg("config") = py::none(), py::arg("seeds"), "Paired runs with and without left turns, as JSON.");

  m.def(
      "run_auction",
      [](const std::vector<double>& bids, const std::string& topology) {
        const int n = static_cast<int>(bids.size());
        cbaa::CommGraph g = topology == "complete" ? cbaa::CommGraph::complete(n)
                          : topology == "line"     ? cbaa::CommGraph::line(n)
                          : topology == "ring"     ? cbaa::CommGraph::ring(n)
                                                   : throw InvalidConfiguration("topology", "expected complete, line or ring");
        const auto r = cbaa::run_auction(bids, g);
        return py::make_tuple(r.agreed.winners, r.agreed.bids, r.iterations);
      },
      py::arg("bids"), py::arg("topology") = "complete",
      "Agreed winners (1-based ids), bids and iteration count.");

  m.def(
      "solve_qp",
      [](const Eigen::MatrixXd& P, const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
        qp::Problem prob{P, c, A, b, 0.0};
        const auto s = qp::solve(prob);
        py::dict out;
        out["status"] = qp::to_string(s.status);
        out["x"] = s.x;
        out["multipliers"] = s.multipliers;
        out["objective"] = s.objective;
        out["kkt"] = s.status == qp::Status::Optimal ? qp::kkt_residuals(prob, s.x, s.multipliers).max() : -1.0;
        return out;
      },
      py::arg("P"), py::arg("c"), py::arg("A"), py::arg("b"), "Minimize 0.5 x'Px + c'x subject to A x >= b.");

  m.def(
      "rollout",
      [](double p, double v, double u, double ts, long steps) {
        VehicleState s{p, v};
        for (long k = 0; k < steps; ++k) s = step(s, u, ts);
        return py::make_tuple(s.p, s.v);
      },
      py::arg("p"), py::arg("v"), py::arg("u"), py::arg("ts"), py::arg("steps"),
      "Constant-input rollout of the point-mass model.");
}
