#include "vicopt/fig2.hpp"

#include "vicopt/dynamics.hpp"

#include <chrono>
#include <cmath>

namespace vicopt {

GainVector single_axis_input(double kd_prime, double kp_prime, double inv_mass) {
  GainVector u = GainVector::Ones();
  u(kDampingBlock) = kd_prime;
  u(kStiffnessBlock) = kp_prime;
  u(kInvMassBlock) = inv_mass;
  return u;
}

namespace {

Fig2Trajectory simulate(const std::string& label, const GainVector& u, const Environment& env,
                        const PlantState& init, const Fig2Config& cfg) {
  Fig2Trajectory tr;
  tr.label = label;
  tr.u = u;
  RolloutOptions ro;
  ro.horizon = cfg.horizon;
  ro.dt = cfg.dt;
  tr.window = rollout(u, init, LiveForce{&env, cfg.substeps}, ro);
  tr.fitave = fitave(tr.window);
  tr.itae = itae(tr.window);
  for (const auto& s : tr.window.samples) {
    const double penetration = cfg.surface.penetration_sign * (s.e(0) - cfg.surface.location);
    if (!tr.touched && penetration > 0.0) {
      tr.touched = true;
      tr.touch_time = s.t;
    }
    if (tr.touched) tr.contact_velocity_peak = std::max(tr.contact_velocity_peak, std::abs(s.e_dot(0)));
  }
  return tr;
}

}  // namespace

Fig2Result reproduce_fig2(const Fig2Config& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.surface.validate();
  Environment env;
  env.surfaces.push_back(cfg.surface);
  PlantState init;
  init.e(0) = cfg.e0;

  RolloutOptions ro;
  ro.horizon = cfg.horizon;
  ro.dt = cfg.dt;
  const ForceSource live = LiveForce{&env, cfg.substeps};

  Box box{Eigen::Vector3d(cfg.lower[0], cfg.lower[1], cfg.lower[2]),
          Eigen::Vector3d(cfg.upper[0], cfg.upper[1], cfg.upper[2])};

  auto optimize = [&](CostKind kind) {
    RolloutOptions opt = ro;
    opt.cost = kind;
    const CostFunction cost = [&](const Eigen::VectorXd& v) {
      return rollout_cost(single_axis_input(v(0), v(1), v(2)), init, live, opt);
    };
    SolveReport best;
    best.objective = std::numeric_limits<double>::infinity();
    for (const auto& s : cfg.starts) {
      SolveReport r = sqp_solve(cost, Eigen::Vector3d(s[0], s[1], s[2]), box, cfg.sqp);
      if (r.objective < best.objective) best = std::move(r);
    }
    return best;
  };

  Fig2Result result;
  result.config = cfg;

  const SolveReport fit = optimize(CostKind::Fitave);
  result.runs[0] = simulate("fitave", single_axis_input(fit.solution(0), fit.solution(1), fit.solution(2)), env,
                            init, cfg);
  result.runs[0].report = fit;

  const SolveReport ita = optimize(CostKind::Itae);
  result.runs[1] = simulate("itae", single_axis_input(ita.solution(0), ita.solution(1), ita.solution(2)), env,
                            init, cfg);
  result.runs[1].report = ita;

  const double m = cfg.manual[0];
  result.runs[2] =
      simulate("manual", single_axis_input(cfg.manual[1] / m, cfg.manual[2] / m, 1.0 / m), env, init, cfg);

  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace vicopt
