#pragma once

#include "qcl/control.hpp"
#include "qcl/landscape.hpp"
#include "qcl/models.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qcl {

/// Follow the (unique) null eigenvector, keeping its sign continuous.
struct NullFollow {
  std::optional<Eigen::VectorXd> previous;
};

/// Project a constant vector a at every point.
struct FixedVector {
  Eigen::VectorXd a;
};

/// Descend a secondary cost: the raw direction is -gradient(w).
struct SecondaryGradient {
  std::function<double(const Eigen::VectorXd&)> cost;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

using DirectionProvider = std::variant<NullFollow, FixedVector, SecondaryGradient>;

struct TrajectorySample {
  double zeta;
  ControlField field;
  double infidelity;
  std::optional<double> secondary;
};

struct Trajectory {
  enum class Status { ok, above_ceiling, non_finite, direction_error };

  std::vector<TrajectorySample> samples;
  HessianMode hessian_mode;
  Status status = Status::ok;
  std::string message;

  double max_step_increase = 0.0;  // soft monitor: largest per-step infidelity growth

  bool failed() const { return status != Status::ok; }
  const TrajectorySample& back() const { return samples.back(); }
};

const char* to_string(Trajectory::Status status);

struct NavigationOptions {
  double h = 0.01;
  int steps = 1;
  HessianMode hessian_mode = HessianMode::exact();
  NullRule rule = NullRule::fixed_rank(2);
  double entry_threshold = 1e-6;
  double abort_ceiling = 1e-3;
};

/// Pa = a - sum over non-null v_i of (a . v_i) v_i
Eigen::VectorXd project(const Eigen::VectorXd& a, const HessianSpectrum& spectrum);

/// Unit null eigenvector with sign chosen so that its dot with `previous` is >= 0.
Eigen::VectorXd null_direction(const HessianSpectrum& spectrum, const std::optional<Eigen::VectorXd>& previous);

/// One classical fourth-order Runge-Kutta step of dy/dz = f(y).
template <typename State, typename Flow>
State rk4_step(Flow&& f, const State& y, double h) {
  const State k1 = f(y);
  const State k2 = f(State(y + 0.5 * h * k1));
  const State k3 = f(State(y + 0.5 * h * k2));
  const State k4 = f(State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Integrate dw/dz = P(w) direction(w) from `start`, recomputing the Hessian
/// spectrum at every Runge-Kutta stage. Sample 0 is the start point. A run that
/// leaves the solution set is returned early with a non-ok status; when the
/// infidelity crosses the abort ceiling the offending sample is kept.
Trajectory navigate(const Problem& problem, const ControlField& start, DirectionProvider provider,
                    const NavigationOptions& options);

}  // namespace qcl
