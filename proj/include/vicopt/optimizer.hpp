#pragma once

// Small dense constrained solvers.
//
// qp_solve: primal active-set method for convex QPs
//     min 1/2 x'Hx + c'x   s.t.  A x + b >= 0
// with an LP phase 1 for an initial feasible point. Singular reduced Hessians
// are handled by moving along zero-curvature descent directions, so H only
// needs to be positive semidefinite.
//
// sqp_solve: SQP for smooth-ish black-box costs over a box plus optional
// linear rows. Central finite-difference gradients, Powell-damped BFGS,
// backtracking Armijo line search.

#include "vicopt/safety.hpp"

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace vicopt {

struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd c;
  /// One row per constraint: A.row(i) x + b(i) >= 0.
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  Eigen::Index size() const { return c.size(); }
  Eigen::Index rows() const { return b.size(); }
  double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(H * x) + c.dot(x); }

  /// Throws ValidationError on dimension mismatch, asymmetry or non-finite data.
  void validate() const;

  static QpProblem from_rows(Eigen::MatrixXd H, Eigen::VectorXd c, const std::vector<ConstraintRow>& rows);
};

enum class SolveStatus {
  Optimal,
  MaxIter,
  Infeasible,
  /// Safety QP was infeasible; the returned point minimizes the worst violation.
  Relaxed,
  Unbounded,
  /// Line search could not decrease the cost any further.
  Stalled,
  NonFiniteCost,
};

std::string_view to_string(SolveStatus status);

struct SolveReport {
  Eigen::VectorXd solution;
  /// QP only: one multiplier per constraint row (zero for inactive rows).
  Eigen::VectorXd multipliers;
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  double kkt_residual = 0.0;
  double objective = 0.0;
  double wall_time = 0.0;
  /// Safety filter only: max(0, -min row value) of the barrier rows at the solution.
  double max_violation = 0.0;

  bool ok() const { return status == SolveStatus::Optimal; }
};

struct QpOptions {
  double tol = 1e-9;
  int max_iter = 200;
};

struct KktResidual {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;

  double max() const;
};

/// Unscaled KKT violation of (x, lambda) for the problem.
KktResidual kkt_residual(const QpProblem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& lambda);

SolveReport qp_solve(const QpProblem& problem, const QpOptions& options = {});
/// Same, starting from x0 (phase 1 is skipped when x0 is feasible).
SolveReport qp_solve(const QpProblem& problem, const Eigen::VectorXd& x0, const QpOptions& options = {});

/// min ||u - u_star||^2 subject to the given rows and the gain bounds. When the
/// rows cannot be satisfied inside the bounds, all rows share one slack s >= 0
/// penalized linearly, bounds stay hard, and the status is Relaxed.
SolveReport safety_filter(const GainVector& u_star, const std::vector<ConstraintRow>& rows,
                          const GainBounds& bounds, const QpOptions& options = {});

using CostFunction = std::function<double(const Eigen::VectorXd&)>;

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct SqpOptions {
  int max_iter = 50;
  double tol = 1e-6;
  /// Finite-difference step is fd_step * max(1, |x_i|).
  double fd_step = 1e-5;
  int max_resample = 10;
  std::uint64_t seed = 0;
  double armijo = 1e-4;
  int max_backtracks = 30;
  QpOptions qp{1e-10, 200};
};

/// Central differences; one-sided next to the box or where a probe is not finite.
Eigen::VectorXd finite_difference_gradient(const CostFunction& cost, const Eigen::VectorXd& x, double fx,
                                           const Box& box, double rel_step);

/// Minimizes cost over the box and `rows` (a.x + b >= 0, same dimension as x).
/// Returns the best feasible iterate. If cost(x0) is not finite, x0 is
/// re-sampled uniformly in the box up to max_resample times.
SolveReport sqp_solve(const CostFunction& cost, const Eigen::VectorXd& x0, const Box& box,
                      const SqpOptions& options = {}, const Eigen::MatrixXd& row_a = {},
                      const Eigen::VectorXd& row_b = {});

}  // namespace vicopt
