#pragma once

// Closed-loop Cartesian impedance dynamics written as a control-affine system
// whose input is the gain vector:
//
//   x = [e; e_dot],   x_dot = [e_dot; 0] + [0; g2(x)] u
//   g2(x) = [diag(-e_dot) | diag(-e) | diag(F)]
//
// which is M e_ddot + K_d e_dot + K_p e = F divided through by the diagonal M.

#include "vicopt/types.hpp"

#include <functional>

namespace vicopt {

using G2Matrix = Eigen::Matrix<double, kAxes, kGainDim>;

/// Force seen by the plant as a function of the (intermediate) state. Stage
/// states carry the stage time, so purely time-dependent sources work too.
using ForceField = std::function<Wrench(const PlantState&)>;

/// Upper limit on a single integration step: one tick of a 125 Hz loop.
inline constexpr double kMaxStep = 1.0 / 125.0;

struct StateDerivative {
  Vector6 e_dot;
  Vector6 e_ddot;
};

G2Matrix assemble_g2(const PlantState& state, const Wrench& wrench);

/// Componentwise e_ddot_i = -u[i] e_dot_i - u[6+i] e_i + u[12+i] F_i.
inline StateDerivative state_derivative(const PlantState& state, const GainVector& u,
                                        const Wrench& wrench) {
  StateDerivative d;
  d.e_dot = state.e_dot;
  d.e_ddot = -u.segment<kAxes>(kDampingBlock).cwiseProduct(state.e_dot) -
             u.segment<kAxes>(kStiffnessBlock).cwiseProduct(state.e) +
             u.segment<kAxes>(kInvMassBlock).cwiseProduct(wrench);
  return d;
}

/// One classical RK4 step with the force evaluated at every stage state.
/// No finiteness check; see integrate_step.
template <typename Force>
PlantState rk4_step(const PlantState& s, const GainVector& u, Force&& force, double dt) {
  auto stage = [&](const Vector6& e, const Vector6& ed, double t) {
    PlantState p{e, ed, t};
    return state_derivative(p, u, force(p));
  };
  const double h2 = 0.5 * dt;
  const StateDerivative k1 = stage(s.e, s.e_dot, s.t);
  const StateDerivative k2 = stage(s.e + h2 * k1.e_dot, s.e_dot + h2 * k1.e_ddot, s.t + h2);
  const StateDerivative k3 = stage(s.e + h2 * k2.e_dot, s.e_dot + h2 * k2.e_ddot, s.t + h2);
  const StateDerivative k4 = stage(s.e + dt * k3.e_dot, s.e_dot + dt * k3.e_ddot, s.t + dt);
  PlantState out;
  out.e = s.e + (dt / 6.0) * (k1.e_dot + 2.0 * k2.e_dot + 2.0 * k3.e_dot + k4.e_dot);
  out.e_dot = s.e_dot + (dt / 6.0) * (k1.e_ddot + 2.0 * k2.e_ddot + 2.0 * k3.e_ddot + k4.e_ddot);
  out.t = s.t + dt;
  return out;
}

/// Advances the state by dt (0 < dt <= kMaxStep) using `substeps` equal RK4
/// steps. Throws NonFiniteError if the result contains NaN/Inf and
/// std::invalid_argument on a bad step.
PlantState integrate_step(const PlantState& state, const GainVector& u, const ForceField& force,
                          double dt, int substeps = 1);

/// M = diag(u[12..17])^-1, K_d = M diag(u[0..5]), K_p = M diag(u[6..11]).
ImpedanceGains recover_gains(const GainVector& u);

/// Inverse of recover_gains.
GainVector input_from_gains(const ImpedanceGains& gains);

}  // namespace vicopt
