#include "vicopt/safety.hpp"

#include <cmath>

namespace vicopt {

void BoxSafeSet::validate() const {
  for (int i = 0; i < kAxes; ++i) {
    if (!active[i]) continue;
    if (!std::isfinite(lower(i)) || !std::isfinite(upper(i))) {
      throw ValidationError("safe set bounds must be finite on active axes");
    }
    if (!(lower(i) < upper(i))) {
      throw ValidationError("safe set requires d_lb < d_ub on active axis " + std::to_string(i));
    }
  }
}

int BoxSafeSet::active_count() const {
  int n = 0;
  for (bool a : active) n += a ? 1 : 0;
  return n;
}

void BarrierParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("barrier gamma must be > 0");
}

std::vector<BarrierValue> barrier_values(const PlantState& state, const BoxSafeSet& set) {
  std::vector<BarrierValue> out;
  out.reserve(2 * kAxes);
  for (int i = 0; i < kAxes; ++i) {
    if (!set.active[i]) continue;
    BarrierValue upper;
    upper.axis = i;
    upper.h = set.upper(i) - state.e(i);
    upper.grad(i) = -1.0;
    out.push_back(upper);

    BarrierValue lower;
    lower.axis = i;
    lower.h = state.e(i) - set.lower(i);
    lower.grad(i) = 1.0;
    out.push_back(lower);
  }
  return out;
}

double extended_barrier(const PlantState& state, const BarrierValue& barrier, const BarrierParams& params) {
  return barrier.grad.dot(state.e_dot) + params.gamma * barrier.h;
}

ConstraintRow constraint_row(const PlantState& state, const Wrench& wrench, const BarrierValue& barrier,
                             const BarrierParams& params) {
  const double g = params.gamma;
  ConstraintRow row;
  row.a = assemble_g2(state, wrench).transpose() * barrier.grad;
  row.b = state.e_dot.dot(barrier.hess * state.e_dot) + 2.0 * g * barrier.grad.dot(state.e_dot) +
          g * g * barrier.h;
  return row;
}

std::vector<ConstraintRow> bound_rows(const GainBounds& bounds) {
  std::vector<ConstraintRow> rows;
  rows.reserve(2 * kGainDim);
  for (int i = 0; i < kGainDim; ++i) {
    ConstraintRow lo;
    lo.a(i) = 1.0;
    lo.b = -bounds.lower(i);
    rows.push_back(lo);
    ConstraintRow hi;
    hi.a(i) = -1.0;
    hi.b = bounds.upper(i);
    rows.push_back(hi);
  }
  return rows;
}

std::vector<ConstraintRow> assemble_constraints(const PlantState& state, const Wrench& wrench,
                                                const BoxSafeSet& set, const BarrierParams& params,
                                                const GainBounds& bounds) {
  std::vector<ConstraintRow> rows;
  for (const auto& barrier : barrier_values(state, set)) {
    rows.push_back(constraint_row(state, wrench, barrier, params));
  }
  const auto box = bound_rows(bounds);
  rows.insert(rows.end(), box.begin(), box.end());
  return rows;
}

}  // namespace vicopt
