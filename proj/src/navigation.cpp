#include "qcl/navigation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qcl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct NonFiniteState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace

const char* to_string(Trajectory::Status status) {
  switch (status) {
    case Trajectory::Status::ok: return "ok";
    case Trajectory::Status::above_ceiling: return "above_ceiling";
    case Trajectory::Status::non_finite: return "non_finite";
    case Trajectory::Status::direction_error: return "direction_error";
  }
  return "unknown";
}

Eigen::VectorXd project(const Eigen::VectorXd& a, const HessianSpectrum& spectrum) {
  if (!spectrum.classified()) throw std::invalid_argument("project: spectrum has no null classification");
  if (a.size() != spectrum.size()) throw std::invalid_argument("project: dimension mismatch");
  Eigen::VectorXd out = a;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (spectrum.is_null(i)) continue;
    const auto v = spectrum.eigenvectors.col(i);
    out -= v.dot(a) * v;
  }
  return out;
}

Eigen::VectorXd null_direction(const HessianSpectrum& spectrum, const std::optional<Eigen::VectorXd>& previous) {
  if (!spectrum.classified()) throw std::invalid_argument("null_direction: spectrum has no null classification");
  if (spectrum.null_dimension() != 1)
    throw std::invalid_argument("null_direction: null subspace has dimension " +
                                std::to_string(spectrum.null_dimension()) + ", expected 1");
  Eigen::Index idx = 0;
  while (!spectrum.is_null(idx)) ++idx;
  Eigen::VectorXd v = spectrum.eigenvectors.col(idx).normalized();
  if (previous && previous->dot(v) < 0.0) v = -v;
  return v;
}

Trajectory navigate(const Problem& problem, const ControlField& start, DirectionProvider provider,
                    const NavigationOptions& options) {
  validate(problem);
  check_compatible(problem, start);
  if (!(options.h > 0.0)) throw std::invalid_argument("navigate: step h must be positive");
  if (options.steps < 1) throw std::invalid_argument("navigate: steps must be >= 1");
  if (const auto* fixed = std::get_if<FixedVector>(&provider)) {
    if (fixed->a.size() != start.size()) throw std::invalid_argument("navigate: direction dimension mismatch");
    if (!(fixed->a.norm() > 0.0)) throw std::invalid_argument("navigate: zero direction vector");
  }
  const double start_infidelity = infidelity(problem, start);
  if (!(start_infidelity < options.entry_threshold))
    throw std::invalid_argument("navigate: start infidelity " + std::to_string(start_infidelity) +
                                " is not below the entry threshold");

  const auto* secondary = std::get_if<SecondaryGradient>(&provider);
  const auto secondary_cost = [&](const Eigen::VectorXd& w) -> std::optional<double> {
    if (secondary) return secondary->cost(w);
    return std::nullopt;
  };

  const auto flow = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    if (!w.allFinite()) throw NonFiniteState("non-finite stage point");
    const HessianSpectrum spectrum =
        hessian_spectrum(problem, make_field(problem, w), options.hessian_mode, options.rule);
    const Eigen::VectorXd direction = std::visit(
        overloaded{
            [&](NullFollow& follow) -> Eigen::VectorXd {
              Eigen::VectorXd d = null_direction(spectrum, follow.previous);
              follow.previous = d;
              return d;
            },
            [&](FixedVector& fixed) -> Eigen::VectorXd { return fixed.a; },
            [&](SecondaryGradient& grad) -> Eigen::VectorXd { return -grad.gradient(w); },
        },
        provider);
    return project(direction, spectrum);
  };

  Trajectory out;
  out.hessian_mode = options.hessian_mode;
  out.samples.reserve(static_cast<std::size_t>(options.steps) + 1);
  out.samples.push_back({0.0, start, start_infidelity, secondary_cost(start.values())});

  Eigen::VectorXd w = start.values();
  double previous = start_infidelity;
  for (int step = 1; step <= options.steps; ++step) {
    Eigen::VectorXd next;
    try {
      next = rk4_step(flow, w, options.h);
    } catch (const NonFiniteState& e) {
      out.status = Trajectory::Status::non_finite;
      out.message = e.what();
      break;
    } catch (const std::exception& e) {
      out.status = Trajectory::Status::direction_error;
      out.message = e.what();
      break;
    }
    if (!next.allFinite()) {
      out.status = Trajectory::Status::non_finite;
      out.message = "non-finite state at step " + std::to_string(step);
      break;
    }
    const double value = infidelity(problem, next);
    if (!std::isfinite(value)) {
      out.status = Trajectory::Status::non_finite;
      out.message = "non-finite infidelity at step " + std::to_string(step);
      break;
    }
    out.max_step_increase = std::max(out.max_step_increase, value - previous);
    previous = value;
    w = next;
    out.samples.push_back({step * options.h, make_field(problem, w), value, secondary_cost(w)});
    if (value > options.abort_ceiling) {
      out.status = Trajectory::Status::above_ceiling;
      out.message = "infidelity " + std::to_string(value) + " above ceiling at step " + std::to_string(step);
      break;
    }
  }
  return out;
}

}  // namespace qcl
