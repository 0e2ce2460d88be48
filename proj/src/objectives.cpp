#include "qcl/objectives.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qcl {

namespace {

void check_dimension(Eigen::Index got, const FourierObjective& objective) {
  if (got != objective.dimension()) throw std::invalid_argument("Fourier objective: dimension mismatch");
}

}  // namespace

FourierObjective::FourierObjective(FrequencySpec spec) : spec_(std::move(spec)) {
  const Eigen::Index m = spec_.dimension();
  const int mi = static_cast<int>(m);
  // cos(2 pi k d / M) depends only on (k d) mod M
  Eigen::VectorXd by_lag = Eigen::VectorXd::Zero(m);
  for (int lag = 0; lag < mi; ++lag) {
    for (int k = 0; k < mi; ++k) {
      if (spec_.contains(k)) continue;
      by_lag(lag) += std::cos(2.0 * std::numbers::pi * static_cast<double>((k * lag) % mi) / mi);
    }
  }
  penalty_.resize(m, m);
  for (Eigen::Index n = 0; n < m; ++n)
    for (Eigen::Index j = 0; j < m; ++j) penalty_(n, j) = by_lag(((n - j) % m + m) % m);
}

double FourierObjective::cost(const Eigen::VectorXd& values) const {
  check_dimension(values.size(), *this);
  return std::max(0.0, values.dot(penalty_ * values));
}

Eigen::VectorXd FourierObjective::gradient(const Eigen::VectorXd& values) const {
  check_dimension(values.size(), *this);
  return 2.0 * penalty_ * values;
}

double fourier_cost(const ControlField& field, const FourierObjective& objective) {
  return objective.cost(field.values());
}

double fourier_cost_spectral(const ControlField& field, const FourierObjective& objective) {
  check_dimension(field.size(), objective);
  const Spectrum spectrum = dft(field);
  double total = 0.0;
  for (Eigen::Index k = 0; k < spectrum.size(); ++k)
    if (!objective.spec().contains(static_cast<int>(k))) total += power(spectrum, k);
  return total;
}

Eigen::VectorXd fourier_gradient(const ControlField& field, const FourierObjective& objective) {
  return objective.gradient(field.values());
}

Trajectory compress(const Problem& problem, const ControlField& start, const FourierObjective& objective,
                    const NavigationOptions& options) {
  check_dimension(start.size(), objective);
  SecondaryGradient descent{[&objective](const Eigen::VectorXd& w) { return objective.cost(w); },
                            [&objective](const Eigen::VectorXd& w) { return objective.gradient(w); }};
  return navigate(problem, start, std::move(descent), options);
}

}  // namespace qcl
