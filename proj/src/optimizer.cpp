#include "vicopt/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace vicopt {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Clock = std::chrono::steady_clock;

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ActiveSetState {
  VectorXd x;
  VectorXd lambda;
  std::vector<int> working;
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
};

// Primal active-set iterations from a feasible x.
ActiveSetState active_set(const MatrixXd& H, const VectorXd& c, const MatrixXd& A, const VectorXd& b,
                          VectorXd x, double tol, int max_iter) {
  const Eigen::Index n = x.size();
  const Eigen::Index m = b.size();
  ActiveSetState st;
  st.lambda = VectorXd::Zero(m);
  std::vector<char> in_working(static_cast<std::size_t>(m), 0);
  std::vector<int>& W = st.working;

  const double h_scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  // Set after an unblocked Newton step: x minimizes on the working subspace.
  bool subspace_min = false;
  for (int it = 0; it < max_iter; ++it) {
    st.iterations = it + 1;
    const VectorXd g = H * x + c;
    const double g_scale = 1.0 + g.cwiseAbs().maxCoeff();
    const auto k = static_cast<Eigen::Index>(W.size());

    MatrixXd Z;
    Eigen::HouseholderQR<MatrixXd> qr;
    if (k > 0) {
      MatrixXd AWt(n, k);
      for (Eigen::Index j = 0; j < k; ++j) AWt.col(j) = A.row(W[j]).transpose();
      qr.compute(AWt);
      const MatrixXd Q = qr.householderQ();
      Z = Q.rightCols(n - k);
    } else {
      Z = MatrixXd::Identity(n, n);
    }

    VectorXd p = VectorXd::Zero(n);
    bool ray = false;
    if (Z.cols() > 0 && !subspace_min) {
      const VectorXd gr = Z.transpose() * g;
      const MatrixXd Hr = Z.transpose() * H * Z;
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(Hr);
      const VectorXd& ev = eig.eigenvalues();
      const MatrixXd& V = eig.eigenvectors();
      const double flat = 1e-11 * h_scale;
      const VectorXd coeff = V.transpose() * gr;
      VectorXd flat_part = VectorXd::Zero(Hr.rows());
      VectorXd newton = VectorXd::Zero(Hr.rows());
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) <= flat) {
          flat_part += coeff(i) * V.col(i);
        } else {
          newton += (coeff(i) / ev(i)) * V.col(i);
        }
      }
      if (flat_part.cwiseAbs().maxCoeff() > 1e-12 * g_scale) {
        p = -Z * flat_part;
        ray = true;
      } else {
        p = -Z * newton;
      }
    }

    const double x_scale = 1.0 + x.cwiseAbs().maxCoeff();
    if (!ray && p.cwiseAbs().maxCoeff() <= 1e-13 * x_scale) {
      // Stationary on the working subspace: check multiplier signs.
      VectorXd lw;
      if (k > 0) {
        const VectorXd qtg = qr.householderQ().transpose() * g;
        lw = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(qtg.head(k));
      }
      Eigen::Index drop = -1;
      double most_negative = -tol;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (lw(j) < most_negative) {
          most_negative = lw(j);
          drop = j;
        }
      }
      if (drop < 0) {
        st.lambda.setZero();
        for (Eigen::Index j = 0; j < k; ++j) st.lambda(W[j]) = std::max(0.0, lw(j));
        st.x = x;
        st.status = SolveStatus::Optimal;
        return st;
      }
      in_working[static_cast<std::size_t>(W[drop])] = 0;
      W.erase(W.begin() + drop);
      subspace_min = false;
      continue;
    }

    double alpha = ray ? kInf : 1.0;
    int blocking = -1;
    const double p_norm = p.norm();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (in_working[static_cast<std::size_t>(i)]) continue;
      const double ap = A.row(i).dot(p);
      if (ap >= -1e-14 * (1.0 + A.row(i).norm() * p_norm)) continue;
      const double slack = std::max(0.0, A.row(i).dot(x) + b(i));
      const double a_i = slack / -ap;
      if (a_i < alpha) {
        alpha = a_i;
        blocking = static_cast<int>(i);
      }
    }
    if (!std::isfinite(alpha)) {
      st.x = x;
      st.status = SolveStatus::Unbounded;
      return st;
    }
    x += alpha * p;
    if (blocking >= 0) {
      W.push_back(blocking);
      in_working[static_cast<std::size_t>(blocking)] = 1;
    }
    subspace_min = !ray && blocking < 0;
  }
  st.x = x;
  st.status = SolveStatus::MaxIter;
  return st;
}

double min_row_value(const MatrixXd& A, const VectorXd& b, const VectorXd& x) {
  if (b.size() == 0) return kInf;
  return (A * x + b).minCoeff();
}

}  // namespace

void QpProblem::validate() const {
  const Eigen::Index n = c.size();
  if (H.rows() != n || H.cols() != n) throw ValidationError("QP: H must be n x n");
  if (A.rows() != b.size() || (A.rows() > 0 && A.cols() != n)) throw ValidationError("QP: A must be m x n");
  if (!H.allFinite() || !c.allFinite() || !A.allFinite() || !b.allFinite()) {
    throw ValidationError("QP: data must be finite");
  }
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, H.cwiseAbs().maxCoeff())) {
    throw ValidationError("QP: H must be symmetric");
  }
}

QpProblem QpProblem::from_rows(MatrixXd H, VectorXd c, const std::vector<ConstraintRow>& rows) {
  QpProblem p;
  p.H = std::move(H);
  p.c = std::move(c);
  p.A.resize(static_cast<Eigen::Index>(rows.size()), p.c.size());
  p.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    p.A.row(static_cast<Eigen::Index>(i)) = rows[i].a.transpose();
    p.b(static_cast<Eigen::Index>(i)) = rows[i].b;
  }
  return p;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Relaxed: return "relaxed";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Stalled: return "stalled";
    case SolveStatus::NonFiniteCost: return "non_finite_cost";
  }
  return "unknown";
}

double KktResidual::max() const { return std::max({stationarity, primal, dual, complementarity}); }

KktResidual kkt_residual(const QpProblem& p, const VectorXd& x, const VectorXd& lambda) {
  KktResidual r;
  VectorXd grad = p.H * x + p.c;
  if (p.rows() > 0) grad -= p.A.transpose() * lambda;
  r.stationarity = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;
  if (p.rows() > 0) {
    const VectorXd s = p.A * x + p.b;
    r.primal = std::max(0.0, -s.minCoeff());
    r.dual = std::max(0.0, -lambda.minCoeff());
    r.complementarity = lambda.cwiseProduct(s).cwiseAbs().maxCoeff();
  }
  return r;
}

SolveReport qp_solve(const QpProblem& problem, const QpOptions& options) {
  return qp_solve(problem, VectorXd::Zero(problem.size()), options);
}

SolveReport qp_solve(const QpProblem& problem, const VectorXd& x0, const QpOptions& options) {
  const auto start = Clock::now();
  problem.validate();
  const Eigen::Index n = problem.size();
  const Eigen::Index m = problem.rows();
  if (x0.size() != n) throw ValidationError("QP: warm start has wrong dimension");

  SolveReport report;
  const double feas_tol = options.tol * (1.0 + (m > 0 ? problem.b.cwiseAbs().maxCoeff() : 0.0));
  VectorXd x = x0;
  int phase1_iterations = 0;

  const double worst = min_row_value(problem.A, problem.b, x);
  if (worst < -feas_tol) {
    // Phase 1: min s  s.t.  A x + b + s >= 0,  s >= 0.
    MatrixXd A1 = MatrixXd::Zero(m + 1, n + 1);
    A1.topLeftCorner(m, n) = problem.A;
    A1.col(n).setOnes();
    VectorXd b1 = VectorXd::Zero(m + 1);
    b1.head(m) = problem.b;
    VectorXd c1 = VectorXd::Zero(n + 1);
    c1(n) = 1.0;
    VectorXd z(n + 1);
    z.head(n) = x;
    z(n) = -worst;
    auto p1 = active_set(MatrixXd::Zero(n + 1, n + 1), c1, A1, b1, z, options.tol, options.max_iter);
    phase1_iterations = p1.iterations;
    if (p1.status == SolveStatus::MaxIter) {
      report.solution = p1.x.head(n);
      report.multipliers = VectorXd::Zero(m);
      report.status = SolveStatus::MaxIter;
      report.iterations = phase1_iterations;
      report.wall_time = seconds_since(start);
      return report;
    }
    x = p1.x.head(n);
    if (p1.x(n) > feas_tol) {
      report.solution = x;
      report.multipliers = VectorXd::Zero(m);
      report.status = SolveStatus::Infeasible;
      report.iterations = phase1_iterations;
      report.kkt_residual = p1.x(n);
      report.wall_time = seconds_since(start);
      return report;
    }
  }

  auto st = active_set(problem.H, problem.c, problem.A, problem.b, x, options.tol,
                       std::max(1, options.max_iter - phase1_iterations));
  report.solution = st.x;
  report.multipliers = st.lambda;
  report.status = st.status;
  report.iterations = phase1_iterations + st.iterations;
  report.objective = problem.objective(st.x);
  report.kkt_residual = kkt_residual(problem, st.x, st.lambda).max();
  if (report.status == SolveStatus::Optimal && report.kkt_residual > options.tol) {
    // Rounding on badly scaled data; the point is still the active-set optimum.
    const double scale = 1.0 + problem.c.cwiseAbs().maxCoeff() +
                         (problem.H * st.x).cwiseAbs().maxCoeff() +
                         (m > 0 ? problem.b.cwiseAbs().maxCoeff() : 0.0);
    report.kkt_residual /= scale;
    if (report.kkt_residual > options.tol) report.status = SolveStatus::MaxIter;
  }
  report.wall_time = seconds_since(start);
  return report;
}

SolveReport safety_filter(const GainVector& u_star, const std::vector<ConstraintRow>& rows,
                          const GainBounds& bounds, const QpOptions& options) {
  const auto start = Clock::now();
  std::vector<ConstraintRow> all = rows;
  const auto box = bound_rows(bounds);
  all.insert(all.end(), box.begin(), box.end());

  const GainVector start_point = bounds.clamp(u_star);
  auto problem = QpProblem::from_rows(2.0 * MatrixXd::Identity(kGainDim, kGainDim), -2.0 * u_star, all);
  SolveReport report = qp_solve(problem, start_point, options);

  auto violation = [&rows](const VectorXd& u) {
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, -(r.a.dot(u) + r.b));
    return worst;
  };

  if (report.status == SolveStatus::Infeasible) {
    // Relaxation: min ||u - u*||^2 + rho s,  a.u + b + s >= 0,  bounds hard, s >= 0.
    constexpr double rho = 1e6;
    const Eigen::Index n = kGainDim + 1;
    QpProblem relaxed;
    relaxed.H = MatrixXd::Zero(n, n);
    relaxed.H.topLeftCorner(kGainDim, kGainDim) = 2.0 * MatrixXd::Identity(kGainDim, kGainDim);
    relaxed.c = VectorXd::Zero(n);
    relaxed.c.head(kGainDim) = -2.0 * u_star;
    relaxed.c(kGainDim) = rho;
    const auto m = static_cast<Eigen::Index>(all.size());
    relaxed.A = MatrixXd::Zero(m + 1, n);
    relaxed.b = VectorXd::Zero(m + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
      relaxed.A.row(i).head(kGainDim) = all[static_cast<std::size_t>(i)].a.transpose();
      relaxed.b(i) = all[static_cast<std::size_t>(i)].b;
      if (i < static_cast<Eigen::Index>(rows.size())) relaxed.A(i, kGainDim) = 1.0;
    }
    relaxed.A(m, kGainDim) = 1.0;
    VectorXd z(n);
    z.head(kGainDim) = start_point;
    z(kGainDim) = violation(start_point);
    SolveReport r2 = qp_solve(relaxed, z, options);
    report.solution = r2.solution.head(kGainDim);
    report.multipliers = r2.multipliers.head(m);
    report.iterations += r2.iterations;
    report.kkt_residual = r2.kkt_residual;
    report.objective = (report.solution - u_star).squaredNorm();
    report.status = SolveStatus::Relaxed;
  } else {
    report.objective = (report.solution - u_star).squaredNorm();
  }
  report.max_violation = violation(report.solution);
  report.wall_time = seconds_since(start);
  return report;
}

VectorXd finite_difference_gradient(const CostFunction& cost, const VectorXd& x, double fx, const Box& box,
                                    double rel_step) {
  const Eigen::Index n = x.size();
  VectorXd g = VectorXd::Zero(n);
  VectorXd probe = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x(i)));
    const bool can_up = box.upper.size() == 0 || x(i) + h <= box.upper(i);
    const bool can_down = box.lower.size() == 0 || x(i) - h >= box.lower(i);
    double f_up = kInf;
    double f_down = kInf;
    if (can_up) {
      probe(i) = x(i) + h;
      f_up = cost(probe);
    }
    if (can_down) {
      probe(i) = x(i) - h;
      f_down = cost(probe);
    }
    probe(i) = x(i);
    if (std::isfinite(f_up) && std::isfinite(f_down)) {
      g(i) = (f_up - f_down) / (2.0 * h);
    } else if (std::isfinite(f_up)) {
      g(i) = (f_up - fx) / h;
    } else if (std::isfinite(f_down)) {
      g(i) = (fx - f_down) / h;
    } else if (!can_up && !can_down) {
      // Box narrower than the step: central difference regardless of bounds.
      probe(i) = x(i) + h;
      f_up = cost(probe);
      probe(i) = x(i) - h;
      f_down = cost(probe);
      probe(i) = x(i);
      if (std::isfinite(f_up) && std::isfinite(f_down)) g(i) = (f_up - f_down) / (2.0 * h);
    }
  }
  return g;
}

SolveReport sqp_solve(const CostFunction& cost, const VectorXd& x0, const Box& box, const SqpOptions& options,
                      const MatrixXd& row_a, const VectorXd& row_b) {
  const auto start = Clock::now();
  const Eigen::Index n = x0.size();
  if (box.lower.size() != n || box.upper.size() != n) throw ValidationError("SQP: box has wrong dimension");
  if ((box.upper.array() < box.lower.array()).any()) throw ValidationError("SQP: box upper below lower");
  if (row_a.rows() != row_b.size() || (row_a.rows() > 0 && row_a.cols() != n)) {
    throw ValidationError("SQP: rows have wrong dimension");
  }

  // Constraint rows: box first, then the extra rows.
  const Eigen::Index m = 2 * n + row_b.size();
  MatrixXd A = MatrixXd::Zero(m, n);
  VectorXd b = VectorXd::Zero(m);
  A.topRows(n) = MatrixXd::Identity(n, n);
  b.head(n) = -box.lower;
  A.middleRows(n, n) = -MatrixXd::Identity(n, n);
  b.segment(n, n) = box.upper;
  if (row_b.size() > 0) {
    A.bottomRows(row_b.size()) = row_a;
    b.tail(row_b.size()) = row_b;
  }

  SolveReport report;
  VectorXd x = x0.cwiseMax(box.lower).cwiseMin(box.upper);
  double fx = cost(x);
  std::mt19937_64 rng(options.seed);
  for (int tries = 0; !std::isfinite(fx) && tries < options.max_resample; ++tries) {
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * std::generate_canonical<double, 53>(rng);
    }
    fx = cost(x);
  }
  if (!std::isfinite(fx)) {
    report.solution = x;
    report.status = SolveStatus::NonFiniteCost;
    report.objective = fx;
    report.wall_time = seconds_since(start);
    return report;
  }

  VectorXd g = finite_difference_gradient(cost, x, fx, box, options.fd_step);
  MatrixXd B = MatrixXd::Identity(n, n);
  bool scaled = false;
  report.status = SolveStatus::MaxIter;

  QpProblem sub;
  sub.A = A;
  for (int it = 0; it < options.max_iter; ++it) {
    report.iterations = it + 1;
    // Step subproblem: min 1/2 p'Bp + g'p  s.t.  A (x + p) + b >= 0.
    sub.H = 0.5 * (B + B.transpose());
    sub.c = g;
    sub.b = A * x + b;
    const SolveReport qp = qp_solve(sub, VectorXd::Zero(n), options.qp);
    if (qp.status != SolveStatus::Optimal && qp.status != SolveStatus::MaxIter) {
      report.status = SolveStatus::Stalled;
      break;
    }
    const VectorXd p = qp.solution;
    const double x_scale = 1.0 + x.cwiseAbs().maxCoeff();
    report.kkt_residual = p.cwiseAbs().maxCoeff() / x_scale;
    if (report.kkt_residual <= options.tol) {
      // Take the final short step too when it does not increase the cost.
      const VectorXd x_last = (x + p).cwiseMax(box.lower).cwiseMin(box.upper);
      const double f_last = cost(x_last);
      if (std::isfinite(f_last) && f_last <= fx) {
        x = x_last;
        fx = f_last;
      }
      report.status = SolveStatus::Optimal;
      break;
    }

    const double slope = g.dot(p);
    double alpha = 1.0;
    double f_new = kInf;
    VectorXd x_new;
    bool accepted = false;
    for (int k = 0; k < options.max_backtracks; ++k) {
      x_new = (x + alpha * p).cwiseMax(box.lower).cwiseMin(box.upper);
      f_new = cost(x_new);
      const double required = slope < 0.0 ? fx + options.armijo * alpha * slope : fx;
      if (std::isfinite(f_new) && f_new < required) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      report.status = SolveStatus::Stalled;
      break;
    }

    const VectorXd g_new = finite_difference_gradient(cost, x_new, f_new, box, options.fd_step);
    const VectorXd s = x_new - x;
    const VectorXd y = g_new - g;
    if (!scaled) {
      const double sy = s.dot(y);
      if (sy > 0.0) B = MatrixXd::Identity(n, n) * (y.squaredNorm() / sy);
      scaled = true;
    }
    // Powell-damped BFGS keeps B positive definite on nonconvex costs.
    const VectorXd Bs = B * s;
    const double sBs = s.dot(Bs);
    if (sBs > 1e-300) {
      const double sy = s.dot(y);
      VectorXd r = y;
      if (sy < 0.2 * sBs) {
        const double theta = 0.8 * sBs / (sBs - sy);
        r = theta * y + (1.0 - theta) * Bs;
      }
      const double sr = s.dot(r);
      if (sr > 1e-300) B += r * r.transpose() / sr - Bs * Bs.transpose() / sBs;
    }

    x = x_new;
    fx = f_new;
    g = g_new;
  }

  report.solution = x;
  report.objective = fx;
  report.wall_time = seconds_since(start);
  return report;
}

}  // namespace vicopt
