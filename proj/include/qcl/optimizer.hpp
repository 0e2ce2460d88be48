#pragma once

#include "qcl/control.hpp"
#include "qcl/models.hpp"

#include <cstdint>
#include <vector>

namespace qcl {

struct SeedSpec {
  int count = 1;
  double low = -5.0;
  double high = 5.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct OptimizationReport {
  ControlField field;
  double final_infidelity;
  int iterations;
  bool converged;  // final_infidelity < threshold
};

struct MinimizeOptions {
  double tol = 1e-6;           // stop once infidelity < tol
  int max_iter = 20000;
  double gradient_tol = 1e-10;  // stop once |grad| < gradient_tol
  double threshold = 1e-6;      // I_th used for `converged`
  double armijo_slope = 1e-4;
  double contraction = 0.5;
  std::vector<double>* trace = nullptr;  // accepted infidelities, if set
};

/// Seed i is drawn from its own mt19937_64 stream seeded with rng_seed + i.
std::vector<ControlField> sample_seeds(const SeedSpec& spec, const Problem& problem);

/// Gradient descent with Armijo backtracking on the main objective.
OptimizationReport minimize(const Problem& problem, const ControlField& seed, const MinimizeOptions& options);

inline OptimizationReport minimize(const Problem& problem, const ControlField& seed, double tol, int max_iter) {
  MinimizeOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return minimize(problem, seed, options);
}

}  // namespace qcl
