#include "vicopt/dynamics.hpp"

#include <stdexcept>

namespace vicopt {

G2Matrix assemble_g2(const PlantState& state, const Wrench& wrench) {
  G2Matrix g = G2Matrix::Zero();
  for (int i = 0; i < kAxes; ++i) {
    g(i, kDampingBlock + i) = -state.e_dot(i);
    g(i, kStiffnessBlock + i) = -state.e(i);
    g(i, kInvMassBlock + i) = wrench(i);
  }
  return g;
}

PlantState integrate_step(const PlantState& state, const GainVector& u, const ForceField& force,
                          double dt, int substeps) {
  if (!(dt > 0.0) || dt > kMaxStep * (1.0 + 1e-12)) {
    throw std::invalid_argument("integration step must satisfy 0 < dt <= 1/125 s");
  }
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");

  const double h = dt / substeps;
  PlantState s = state;
  for (int k = 0; k < substeps; ++k) {
    s = rk4_step(s, u, force, h);
  }
  // Land exactly on t + dt regardless of substep rounding.
  s.t = state.t + dt;
  if (!s.finite()) {
    throw NonFiniteError("non-finite state after integration at t=" + std::to_string(s.t));
  }
  return s;
}

ImpedanceGains recover_gains(const GainVector& u) {
  ImpedanceGains g;
  g.mass = u.segment<kAxes>(kInvMassBlock).cwiseInverse();
  g.damping = g.mass.cwiseProduct(u.segment<kAxes>(kDampingBlock));
  g.stiffness = g.mass.cwiseProduct(u.segment<kAxes>(kStiffnessBlock));
  return g;
}

GainVector input_from_gains(const ImpedanceGains& gains) {
  GainVector u;
  u.segment<kAxes>(kDampingBlock) = gains.damping.cwiseQuotient(gains.mass);
  u.segment<kAxes>(kStiffnessBlock) = gains.stiffness.cwiseQuotient(gains.mass);
  u.segment<kAxes>(kInvMassBlock) = gains.mass.cwiseInverse();
  return u;
}

}  // namespace vicopt
