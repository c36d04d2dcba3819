#include "vicopt/dynamics.hpp"
#include "vicopt/fig2.hpp"
#include "vicopt/objective.hpp"
#include "vicopt/optimizer.hpp"
#include "vicopt/runtime.hpp"
#include "vicopt/safety.hpp"
#include "vicopt/scenario_io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace vicopt;

namespace {

PlantState make_state(const Vector6& e, const Vector6& e_dot, double t) {
  PlantState s;
  s.e = e;
  s.e_dot = e_dot;
  s.t = t;
  return s;
}

// Window from (N,) times and (N,6) arrays; dt from the sample spacing.
TrajectoryWindow make_window(const Eigen::VectorXd& t, const Eigen::MatrixXd& e, const Eigen::MatrixXd& e_dot,
                             const Eigen::MatrixXd& force) {
  const auto n = t.size();
  if (n < 2 || e.rows() != n || e_dot.rows() != n || force.rows() != n || e.cols() != kAxes ||
      e_dot.cols() != kAxes || force.cols() != kAxes) {
    throw std::invalid_argument("window needs N >= 2 times and (N, 6) e, e_dot, force arrays");
  }
  TrajectoryWindow w;
  w.dt = t(1) - t(0);
  w.origin_time = t(0);
  for (Eigen::Index k = 0; k < n; ++k) {
    w.samples.push_back({t(k), e.row(k).transpose(), e_dot.row(k).transpose(), force.row(k).transpose()});
  }
  return w;
}

py::dict metrics_dict(const MetricsReport& m) {
  auto value = [](const MetricValue& v) -> py::object {
    if (!v.converged) return py::none();
    return py::float_(v.value);
  };
  py::dict d;
  d["contact_axis"] = m.contact_axis;
  d["approaching_time"] = value(m.approaching_time);
  d["settling_time"] = value(m.settling_time);
  d["steady_force_variance"] = value(m.steady_force_variance);
  d["min_barrier"] = value(m.min_barrier);
  d["fitave_total"] = m.fitave_total;
  return d;
}

py::dict episode_dict(const TrajectoryLog& log) {
  const auto n = static_cast<Eigen::Index>(log.ticks.size());
  Eigen::VectorXd t(n), h_min(n);
  Eigen::MatrixXd e(n, kAxes), e_dot(n, kAxes), force(n, kAxes), u(n, kGainDim);
  Eigen::VectorXi events(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& r = log.ticks[static_cast<std::size_t>(k)];
    t(k) = r.t;
    e.row(k) = r.e.transpose();
    e_dot.row(k) = r.e_dot.transpose();
    force.row(k) = r.force.transpose();
    u.row(k) = r.u.transpose();
    h_min(k) = r.h_min;
    events(k) = static_cast<int>(r.events);
  }
  py::list updates;
  for (const auto& up : log.updates) {
    py::dict d;
    d["tick"] = up.tick;
    d["t"] = up.t;
    d["apply_tick"] = up.apply_tick;
    d["u_star"] = Eigen::VectorXd(up.u_star);
    d["cost_before"] = up.cost_before;
    d["cost_after"] = up.cost_after;
    d["status"] = std::string(to_string(up.report.status));
    d["iterations"] = up.report.iterations;
    d["wall_time"] = up.report.wall_time;
    updates.append(d);
  }
  py::dict d;
  d["t"] = t;
  d["e"] = e;
  d["e_dot"] = e_dot;
  d["force"] = force;
  d["u"] = u;
  d["h_min"] = h_min;
  d["events"] = events;
  d["updates"] = updates;
  d["terminated"] = log.terminated;
  d["terminal_event"] = log.terminal_event;
  return d;
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["solution"] = r.solution;
  d["multipliers"] = r.multipliers;
  d["status"] = std::string(to_string(r.status));
  d["iterations"] = r.iterations;
  d["kkt_residual"] = r.kkt_residual;
  d["objective"] = r.objective;
  d["max_violation"] = r.max_violation;
  return d;
}

}  // namespace

PYBIND11_MODULE(_vicopt, m) {
  m.doc() = "Safe online variable impedance control: dynamics, barrier safety filter, gain optimizer";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NonFiniteError>(m, "NonFiniteError", PyExc_ArithmeticError);

  m.def("input_from_gains",
        [](const Vector6& mass, const Vector6& damping, const Vector6& stiffness) {
          return Eigen::VectorXd(input_from_gains(ImpedanceGains{mass, damping, stiffness}));
        },
        py::arg("mass"), py::arg("damping"), py::arg("stiffness"));
  m.def("recover_gains",
        [](const GainVector& u) {
          const ImpedanceGains g = recover_gains(u);
          return py::make_tuple(Eigen::VectorXd(g.mass), Eigen::VectorXd(g.damping), Eigen::VectorXd(g.stiffness));
        },
        py::arg("u"), "Returns (mass, damping, stiffness).");

  m.def("integrate_step",
        [](const Vector6& e, const Vector6& e_dot, const GainVector& u, const Wrench& force, double dt, int substeps) {
          const ForceField f = [&force](const PlantState&) { return force; };
          const PlantState s = integrate_step(make_state(e, e_dot, 0.0), u, f, dt, substeps);
          return py::make_tuple(Eigen::VectorXd(s.e), Eigen::VectorXd(s.e_dot));
        },
        py::arg("e"), py::arg("e_dot"), py::arg("u"), py::arg("force"), py::arg("dt"), py::arg("substeps") = 1,
        "One RK4 step under a constant external wrench; returns (e, e_dot).");

  m.def("fitave",
        [](const Eigen::VectorXd& t, const Eigen::MatrixXd& e, const Eigen::MatrixXd& e_dot,
           const Eigen::MatrixXd& force) { return fitave(make_window(t, e, e_dot, force)); },
        py::arg("t"), py::arg("e"), py::arg("e_dot"), py::arg("force"));
  m.def("itae",
        [](const Eigen::VectorXd& t, const Eigen::MatrixXd& e, const Eigen::MatrixXd& e_dot,
           const Eigen::MatrixXd& force) { return itae(make_window(t, e, e_dot, force)); },
        py::arg("t"), py::arg("e"), py::arg("e_dot"), py::arg("force"));

  m.def("barrier_rows",
        [](const Vector6& e, const Vector6& e_dot, const Wrench& force, const Vector6& d_lb, const Vector6& d_ub,
           double gamma) {
          BoxSafeSet set;
          set.lower = d_lb;
          set.upper = d_ub;
          const PlantState s = make_state(e, e_dot, 0.0);
          const auto barriers = barrier_values(s, set);
          Eigen::MatrixXd a(static_cast<Eigen::Index>(barriers.size()), kGainDim);
          Eigen::VectorXd b(static_cast<Eigen::Index>(barriers.size()));
          for (std::size_t i = 0; i < barriers.size(); ++i) {
            const ConstraintRow row = constraint_row(s, force, barriers[i], BarrierParams{gamma});
            a.row(static_cast<Eigen::Index>(i)) = row.a.transpose();
            b(static_cast<Eigen::Index>(i)) = row.b;
          }
          return py::make_tuple(a, b);
        },
        py::arg("e"), py::arg("e_dot"), py::arg("force"), py::arg("d_lb"), py::arg("d_ub"), py::arg("gamma") = 5.0,
        "Box barrier constraint rows (A, b) with A u + b >= 0, for the first three axes.");

  m.def("qp_solve",
        [](const Eigen::MatrixXd& H, const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
           double tol, int max_iter) {
          QpProblem p{H, c, A, b};
          return report_dict(qp_solve(p, QpOptions{tol, max_iter}));
        },
        py::arg("H"), py::arg("c"), py::arg("A"), py::arg("b"), py::arg("tol") = 1e-9, py::arg("max_iter") = 200,
        "min 0.5 x'Hx + c'x subject to A x + b >= 0.");

  m.def("safety_filter",
        [](const GainVector& u_star, const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double u_min, double u_max) {
          std::vector<ConstraintRow> rows;
          for (Eigen::Index i = 0; i < A.rows(); ++i) rows.push_back({GainVector(A.row(i).transpose()), b(i)});
          GainBounds bounds;
          bounds.lower.setConstant(u_min);
          bounds.upper.setConstant(u_max);
          return report_dict(safety_filter(u_star, rows, bounds));
        },
        py::arg("u_star"), py::arg("A"), py::arg("b"), py::arg("u_min") = 1e-6, py::arg("u_max") = 1e6);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("episode_length", &Scenario::episode_length)
      .def_property(
          "mode", [](const Scenario& s) { return std::string(to_string(s.loop.mode)); },
          [](Scenario& s, const std::string& v) { s.loop.mode = parse_control_mode(v); })
      .def_property(
          "solve_latency", [](const Scenario& s) { return s.loop.solve_latency; },
          [](Scenario& s, double v) { s.loop.solve_latency = v; })
      .def_property_readonly("tick_rate", [](const Scenario& s) { return s.loop.tick_rate; })
      .def_property_readonly("buffer_period", [](const Scenario& s) { return s.loop.buffer_period; })
      .def("to_json", [](const Scenario& s) { return scenario_to_json(s); })
      .def("__repr__", [](const Scenario& s) { return "<Scenario '" + s.name + "'>"; });

  m.def("parse_scenario", &parse_scenario, py::arg("text"));
  m.def("load_scenario", [](const std::string& path) { return load_scenario(path); }, py::arg("path"));

  m.def("run_episode",
        [](const Scenario& s) {
          TrajectoryLog log;
          {
            py::gil_scoped_release release;
            log = run_episode(s);
          }
          py::dict d = episode_dict(log);
          d["metrics"] = metrics_dict(compute_metrics(log, s.metrics, s.contact_axis()));
          return d;
        },
        py::arg("scenario"), "Runs one episode; returns arrays per tick, update reports and metrics.");

  m.def("compare_baselines",
        [](const Scenario& s, const std::vector<std::string>& modes) {
          std::vector<ControlMode> parsed;
          for (const auto& name : modes) parsed.push_back(parse_control_mode(name));
          py::dict out;
          for (const auto& r : compare_baselines(s, parsed)) out[py::str(std::string(to_string(r.mode)))] = metrics_dict(r.metrics);
          return out;
        },
        py::arg("scenario"), py::arg("modes") = std::vector<std::string>{"constant_gain", "safe_ongo_vic"});

  m.def("reproduce_fig2", [] {
    const Fig2Result r = reproduce_fig2();
    py::dict out;
    for (const auto& run : r.runs) {
      py::dict d;
      Eigen::VectorXd t(static_cast<Eigen::Index>(run.window.samples.size()));
      Eigen::VectorXd e(t.size());
      for (Eigen::Index k = 0; k < t.size(); ++k) {
        t(k) = run.window.samples[static_cast<std::size_t>(k)].t;
        e(k) = run.window.samples[static_cast<std::size_t>(k)].e(0);
      }
      d["t"] = t;
      d["e"] = e;
      d["fitave"] = run.fitave;
      d["itae"] = run.itae;
      d["contact_velocity_peak"] = run.contact_velocity_peak;
      out[py::str(run.label)] = d;
    }
    return out;
  });
}
