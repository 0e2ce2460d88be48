#pragma once

#include "qcl/control.hpp"
#include "qcl/models.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qcl {

struct FdConfig {
  double epsilon = 1e-3;

  void validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw std::invalid_argument("FdConfig: epsilon must be positive and finite");
  }
};

/// Four-point central-difference Hessian of a scalar cost.
///
/// Off-diagonal entries use the stencil
///   [I(w+e(ei+ej)) - I(w+e(ei-ej)) - I(w-e(ei-ej)) + I(w-e(ei+ej))] / (4 e^2),
/// diagonal entries its i == j reduction over the three points w, w +- 2e ei.
/// Only the upper triangle is evaluated; the result is symmetric by construction.
template <typename Cost, typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> fd_hessian(
    Cost&& cost, const Eigen::MatrixBase<Derived>& point, const FdConfig& config) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  config.validate();
  const Scalar eps = static_cast<Scalar>(config.epsilon);
  const Eigen::Index m = point.size();
  Vector x = point;

  const auto eval = [&](const Vector& at) {
    const Scalar value = cost(at);
    if (!std::isfinite(value)) throw std::domain_error("fd_hessian: non-finite cost at stencil point");
    return value;
  };

  const Scalar centre = eval(x);
  const Scalar denom = Scalar(4) * eps * eps;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> h(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Scalar xi = x(i);
    x(i) = xi + Scalar(2) * eps;
    const Scalar up = eval(x);
    x(i) = xi - Scalar(2) * eps;
    const Scalar down = eval(x);
    x(i) = xi;
    h(i, i) = (up - Scalar(2) * centre + down) / denom;

    for (Eigen::Index j = i + 1; j < m; ++j) {
      const Scalar xj = x(j);
      x(i) = xi + eps;
      x(j) = xj + eps;
      const Scalar pp = eval(x);
      x(j) = xj - eps;
      const Scalar pm = eval(x);
      x(i) = xi - eps;
      const Scalar mm = eval(x);
      x(j) = xj + eps;
      const Scalar mp = eval(x);
      x(i) = xi;
      x(j) = xj;
      h(i, j) = h(j, i) = (pp - pm - mp + mm) / denom;
    }
  }
  return h;
}

/// How Hessians are obtained along a run: analytically or by finite differences.
struct HessianMode {
  enum class Kind { exact, finite_difference };
  Kind kind = Kind::exact;
  double epsilon = 1e-2;

  static HessianMode exact() { return {Kind::exact, 0.0}; }
  static HessianMode fd(double epsilon) { return {Kind::finite_difference, epsilon}; }
  bool is_exact() const { return kind == Kind::exact; }
  bool operator==(const HessianMode&) const = default;
};

/// Rule separating the null (fidelity-preserving) directions from the rest.
struct NullRule {
  enum class Kind { threshold, rank };
  Kind kind = Kind::threshold;
  double tau_rel = 1e-6;
  int rank = 2;

  static NullRule threshold(double tau_rel = 1e-6) { return {Kind::threshold, tau_rel, 0}; }
  static NullRule fixed_rank(int rank) { return {Kind::rank, 0.0, rank}; }
  bool operator==(const NullRule&) const = default;
};

/// Eigenpairs of a symmetric matrix, sorted by descending |lambda|.
struct HessianSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column i pairs with eigenvalues(i)
  std::optional<std::vector<bool>> null_mask;

  Eigen::Index size() const { return eigenvalues.size(); }
  bool classified() const { return null_mask.has_value(); }
  bool is_null(Eigen::Index i) const { return (*null_mask)[static_cast<std::size_t>(i)]; }
  int null_dimension() const;
  int non_null_count() const { return static_cast<int>(size()) - null_dimension(); }
};

HessianSpectrum eig_sym(const Eigen::MatrixXd& matrix);

HessianSpectrum classify_null(HessianSpectrum spectrum, const NullRule& rule);

/// 1 - |v_i . v~_i| for the i-th (descending |lambda|) eigenvector.
double eigvec_error(const HessianSpectrum& exact, const HessianSpectrum& approx, Eigen::Index i);

/// Same stencil values as the generic template, but each stencil point reuses
/// the cached propagation of the intervals it leaves unchanged: O(M^2) work
/// instead of O(M^3). No derivative of the cost is used.
Eigen::MatrixXd fd_hessian(const Problem& problem, const ControlField& field, const FdConfig& config);
/// The generic template applied to `infidelity` as a black box.
Eigen::MatrixXd fd_hessian_blackbox(const Problem& problem, const ControlField& field, const FdConfig& config);
Eigen::MatrixXd hessian(const Problem& problem, const ControlField& field, const HessianMode& mode);

inline HessianSpectrum hessian_spectrum(const Problem& problem, const ControlField& field,
                                        const HessianMode& mode, const NullRule& rule) {
  return classify_null(eig_sym(hessian(problem, field, mode)), rule);
}

struct CalibrationOptions {
  int steps = 1000;
  double h = 0.1;
  NullRule rule = NullRule::fixed_rank(2);
  double entry_threshold = 1e-6;
  double abort_ceiling = 1e-3;
};

struct CalibrationRow {
  double epsilon;
  double final_infidelity;
};

/// For each epsilon, navigate from `solution` along the projection of the fixed
/// `direction` using FD Hessians and record the end-of-run infidelity.
std::vector<CalibrationRow> calibrate_epsilon(const Problem& problem, const ControlField& solution,
                                              const Eigen::VectorXd& direction,
                                              const std::vector<double>& eps_grid,
                                              const CalibrationOptions& options = {});

}  // namespace qcl
