#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace vicopt {

inline constexpr int kAxes = 6;
inline constexpr int kGainDim = 18;

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using GainVector = Eigen::Matrix<double, kGainDim, 1>;
using Wrench = Vector6;

/// Offsets of the three 6-blocks inside a GainVector:
/// [K'_d (1/s) | K'_p (1/s^2) | M^-1 (1/kg)].
inline constexpr int kDampingBlock = 0;
inline constexpr int kStiffnessBlock = 6;
inline constexpr int kInvMassBlock = 12;

/// Tracking error state x = [e; e_dot] at simulation time t.
struct PlantState {
  Vector6 e = Vector6::Zero();
  Vector6 e_dot = Vector6::Zero();
  double t = 0.0;

  bool finite() const { return e.allFinite() && e_dot.allFinite() && std::isfinite(t); }
};

/// Diagonal impedance matrices M, K_d, K_p.
struct ImpedanceGains {
  Vector6 mass = Vector6::Ones();
  Vector6 damping = Vector6::Ones();
  Vector6 stiffness = Vector6::Ones();

  bool positive() const {
    return (mass.array() > 0).all() && (damping.array() > 0).all() &&
           (stiffness.array() > 0).all();
  }
};

/// Componentwise box on the gain vector. Both optimizations need a compact
/// feasible set; positivity alone is not enough.
struct GainBounds {
  GainVector lower = GainVector::Constant(1e-6);
  GainVector upper = GainVector::Constant(1e6);

  bool contains(const GainVector& u, double tol = 0.0) const {
    return ((u - lower).array() >= -tol).all() && ((upper - u).array() >= -tol).all();
  }
  GainVector clamp(const GainVector& u) const { return u.cwiseMax(lower).cwiseMin(upper); }
  void validate() const;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration produced NaN/Inf; the gain/stiffness combination is outside the
/// integrable range for the chosen step.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line = 0, std::string field = {})
      : Error(format(message, line, field)), line_(line), field_(std::move(field)) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(const std::string& message, int line, const std::string& field) {
    std::string out = message;
    if (!field.empty()) out += " (field '" + field + "')";
    if (line > 0) out += " at line " + std::to_string(line);
    return out;
  }

  int line_;
  std::string field_;
};

inline void GainBounds::validate() const {
  if (!lower.allFinite() || !upper.allFinite()) throw ValidationError("gain bounds must be finite");
  if ((lower.array() <= 0).any()) throw ValidationError("gain lower bounds must be strictly positive");
  if ((upper.array() < lower.array()).any()) throw ValidationError("gain upper bound below lower bound");
}

}  // namespace vicopt
