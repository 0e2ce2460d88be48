#pragma once

#include "qcl/control.hpp"
#include "qcl/models.hpp"
#include "qcl/navigation.hpp"

#include <Eigen/Dense>

namespace qcl {

/// Fourier-compression cost C(w) = sum_{k not kept} |X_k|^2 = w^T Q w with
/// Q_nm = sum_{k not kept} cos(2 pi k (n - m) / M).
class FourierObjective {
 public:
  explicit FourierObjective(FrequencySpec spec);

  const FrequencySpec& spec() const { return spec_; }
  const Eigen::MatrixXd& penalty_matrix() const { return penalty_; }
  Eigen::Index dimension() const { return spec_.dimension(); }

  double cost(const Eigen::VectorXd& values) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& values) const;

 private:
  FrequencySpec spec_;
  Eigen::MatrixXd penalty_;
};

/// Quadratic-form evaluation.
double fourier_cost(const ControlField& field, const FourierObjective& objective);
/// Same quantity summed from the DFT of the field.
double fourier_cost_spectral(const ControlField& field, const FourierObjective& objective);
/// 2 Q w
Eigen::VectorXd fourier_gradient(const ControlField& field, const FourierObjective& objective);

/// Descend C along the solution set of the main objective.
Trajectory compress(const Problem& problem, const ControlField& start, const FourierObjective& objective,
                    const NavigationOptions& options);

}  // namespace qcl
