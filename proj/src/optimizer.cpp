#include "qcl/optimizer.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace qcl {

void SeedSpec::validate() const {
  if (count < 1) throw std::invalid_argument("SeedSpec: count must be >= 1");
  if (!(low <= high) || !std::isfinite(low) || !std::isfinite(high))
    throw std::invalid_argument("SeedSpec: bounds must satisfy low <= high");
}

std::vector<ControlField> sample_seeds(const SeedSpec& spec, const Problem& problem) {
  spec.validate();
  validate(problem);
  const int m = n_pulses(problem);
  std::vector<ControlField> seeds;
  seeds.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) {
    std::mt19937_64 rng(spec.rng_seed + static_cast<std::uint64_t>(i));
    Eigen::VectorXd w(m);
    for (int j = 0; j < m; ++j) {
      // 53 random bits -> [0, 1); fixed mapping so streams replay across standard libraries
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      w(j) = spec.low + (spec.high - spec.low) * u;
    }
    seeds.push_back(make_field(problem, std::move(w)));
  }
  return seeds;
}

OptimizationReport minimize(const Problem& problem, const ControlField& seed, const MinimizeOptions& options) {
  check_compatible(problem, seed);
  Eigen::VectorXd w = seed.values();
  double value = infidelity(problem, seed);
  const auto report = [&](int iterations, bool aborted) {
    return OptimizationReport{make_field(problem, w), value, iterations,
                              !aborted && value < options.threshold};
  };
  if (options.trace) options.trace->push_back(value);

  double step = 1.0;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    if (value < options.tol) break;
    const Eigen::VectorXd g = exact_gradient(problem, make_field(problem, w));
    const double g2 = g.squaredNorm();
    if (std::sqrt(g2) < options.gradient_tol) break;

    bool accepted = false;
    double t = step;
    Eigen::VectorXd trial;
    double trial_value = 0.0;
    for (int k = 0; k < 80; ++k) {
      trial = w - t * g;
      trial_value = trial.allFinite() ? infidelity(problem, trial) : std::nan("");
      if (!std::isfinite(trial_value)) return report(it, true);
      if (trial_value <= value - options.armijo_slope * t * g2) {
        accepted = true;
        break;
      }
      t *= options.contraction;
    }
    if (!accepted) break;
    w = trial;
    value = trial_value;
    step = t / options.contraction;
    if (options.trace) options.trace->push_back(value);
  }
  return report(it, false);
}

}  // namespace qcl
