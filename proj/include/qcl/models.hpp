#pragma once

#include "qcl/control.hpp"

#include <Eigen/Dense>

#include <complex>
#include <variant>

namespace qcl {

/// Two-level Landau-Zener sweep, H(w) = (gap/2) sigma_x + w sigma_z, |0> -> |1>.
struct LzProblem {
  double gap = 1.0;
  double duration = 1.0;
  int n_pulses = 1;

  void validate() const;
  bool operator==(const LzProblem&) const = default;
};

/// Frequency-driven harmonic trap (m = hbar = 1) targeting friction-less evolution.
struct QhoProblem {
  double omega_start = 1.0;
  double omega_target = 1.0;
  double duration = 1.0;
  int n_pulses = 1;
  double n_initial = 0.0;

  void validate() const;
  bool operator==(const QhoProblem&) const = default;
};

using Problem = std::variant<LzProblem, QhoProblem>;

struct LzPropagation {
  Eigen::Matrix2cd unitary;
  std::complex<double> overlap;  // <1|U_T|0>
};

struct BogoliubovPair {
  std::complex<double> alpha;
  std::complex<double> beta;
};

int n_pulses(const Problem& problem);
double duration(const Problem& problem);
void validate(const Problem& problem);

/// Throws std::invalid_argument when the field's M or T differ from the problem's.
void check_compatible(const Problem& problem, const ControlField& field);

inline ControlField make_field(const Problem& problem, Eigen::VectorXd values) {
  return {std::move(values), duration(problem)};
}

// Closed-form interval maps.
Eigen::Matrix2cd lz_interval_propagator(double gap, double omega, double dt);
Eigen::Matrix2d qho_transfer_matrix(double omega, double dt);

// Both objectives read I = |readout * U_M(w_M) ... U_1(w_1) * initial|^2.
Eigen::Vector2cd chain_initial(const Problem& problem);
Eigen::RowVector2cd chain_readout(const Problem& problem);
Eigen::Matrix2cd interval_map(const Problem& problem, double omega, double dt);

LzPropagation lz_propagate(const LzProblem& problem, const ControlField& field);
/// 1 - |<1|U_T|0>|^2, evaluated as |<0|U_T|0>|^2 (equal for unitary U_T, no cancellation).
double lz_infidelity(const LzProblem& problem, const ControlField& field);

BogoliubovPair qho_propagate(const QhoProblem& problem, const ControlField& field);
double qho_infidelity(const QhoProblem& problem, const ControlField& field);
/// N(T) = N0 (1 + 2|beta|^2) + |beta|^2
double particle_number(const QhoProblem& problem, const ControlField& field);

/// Main objective of either model.
double infidelity(const Problem& problem, const ControlField& field);
double infidelity(const Problem& problem, const Eigen::VectorXd& values);

Eigen::VectorXd exact_gradient(const Problem& problem, const ControlField& field);

/// Symmetric M x M Hessian of the main objective from one forward sweep.
Eigen::MatrixXd exact_hessian(const Problem& problem, const ControlField& field);

/// Upper triangle from a forward sweep, lower triangle from an independent
/// backward sweep; no symmetrization. Used to check the two agree.
Eigen::MatrixXd exact_hessian_unsymmetrized(const Problem& problem, const ControlField& field);

}  // namespace qcl
