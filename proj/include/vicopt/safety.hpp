#pragma once

// Position barriers h_p(e) >= 0 and the input constraint obtained by applying
// the zeroing-barrier condition twice (h has relative degree 2 in u):
//
//   h'(x)  = dh/de . e_dot + gamma h
//   h'' := d/dt h' + gamma h'
//        = e_dot^T (d2h/de2) e_dot + dh/de . (g2(x) u + 2 gamma e_dot) + gamma^2 h  >= 0
//
// Every row is linear in u and is stored as a.u + b >= 0.

#include "vicopt/dynamics.hpp"

#include <array>
#include <vector>

namespace vicopt {

/// Componentwise box d_lb <= e <= d_ub on the axes flagged active.
struct BoxSafeSet {
  Vector6 lower = Vector6::Constant(-1.0);
  Vector6 upper = Vector6::Constant(1.0);
  std::array<bool, kAxes> active{true, true, true, false, false, false};

  void validate() const;
  int active_count() const;
};

struct BarrierParams {
  double gamma = 5.0;

  void validate() const;
};

/// A scalar barrier h_p(e) evaluated at a state, with its first and second
/// derivatives in e. `axis` is informational (-1 for non-axis barriers).
struct BarrierValue {
  double h = 0.0;
  Vector6 grad = Vector6::Zero();
  Matrix6 hess = Matrix6::Zero();
  int axis = -1;
};

struct ConstraintRow {
  GainVector a = GainVector::Zero();
  double b = 0.0;

  double value(const GainVector& u) const { return a.dot(u) + b; }
};

/// Upper then lower barrier for each active axis: h = d_ub - e_i, h = e_i - d_lb.
std::vector<BarrierValue> barrier_values(const PlantState& state, const BoxSafeSet& set);

double extended_barrier(const PlantState& state, const BarrierValue& barrier, const BarrierParams& params);

ConstraintRow constraint_row(const PlantState& state, const Wrench& wrench, const BarrierValue& barrier,
                             const BarrierParams& params);

/// Rows u_i - lower_i >= 0 and upper_i - u_i >= 0, lower first.
std::vector<ConstraintRow> bound_rows(const GainBounds& bounds);

/// Barrier rows for every active barrier followed by the 36 bound rows.
std::vector<ConstraintRow> assemble_constraints(const PlantState& state, const Wrench& wrench,
                                                const BoxSafeSet& set, const BarrierParams& params,
                                                const GainBounds& bounds);

}  // namespace vicopt
