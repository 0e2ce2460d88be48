#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

namespace qcl {

/// Piecewise-constant control protocol: M amplitudes held for dt = T/M each.
class ControlField {
 public:
  ControlField(Eigen::VectorXd values, double total_time)
      : values_(std::move(values)), total_time_(total_time) {
    if (values_.size() < 1) throw std::invalid_argument("ControlField: needs at least one amplitude");
    if (!(total_time_ > 0.0) || !std::isfinite(total_time_))
      throw std::invalid_argument("ControlField: total time must be positive and finite");
    if (!values_.allFinite()) throw std::invalid_argument("ControlField: non-finite amplitude");
  }

  const Eigen::VectorXd& values() const { return values_; }
  double total_time() const { return total_time_; }
  Eigen::Index size() const { return values_.size(); }
  double dt() const { return total_time_ / static_cast<double>(values_.size()); }

  /// Same duration, new amplitudes.
  ControlField with_values(Eigen::VectorXd values) const { return {std::move(values), total_time_}; }

  bool operator==(const ControlField& other) const {
    return total_time_ == other.total_time_ && values_.size() == other.values_.size() && values_ == other.values_;
  }

 private:
  Eigen::VectorXd values_;
  double total_time_;
};

/// DFT indices whose power is allowed in a compressed protocol.
///
/// By default the user set is closed under k -> (M-k) mod M and 0 is added, so
/// the kept set is reachable by a real field with non-zero mean. `strict`
/// keeps the requested indices verbatim.
class FrequencySpec {
 public:
  FrequencySpec(std::vector<int> requested, Eigen::Index dimension, bool strict = false);

  const std::vector<int>& requested() const { return requested_; }
  const std::set<int>& kept() const { return kept_; }
  Eigen::Index dimension() const { return dimension_; }
  bool strict() const { return strict_; }
  bool contains(int k) const { return kept_.count(k) != 0; }

 private:
  std::vector<int> requested_;
  std::set<int> kept_;
  Eigen::Index dimension_;
  bool strict_;
};

struct Spectrum {
  Eigen::VectorXcd components;

  Eigen::Index size() const { return components.size(); }
};

/// Direct O(M^2) discrete Fourier transform, X_k = sum_n x_n exp(-2 pi i k n / M).
template <typename Derived>
Eigen::Matrix<std::complex<typename Derived::Scalar>, Eigen::Dynamic, 1> dft(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  const Eigen::Index m = x.size();
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> out(m);
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  for (Eigen::Index k = 0; k < m; ++k) {
    Complex acc(0);
    for (Eigen::Index n = 0; n < m; ++n) {
      // reduce k*n first so the phase argument stays in [0, 2pi)
      const Scalar phase = -two_pi * static_cast<Scalar>((k * n) % m) / static_cast<Scalar>(m);
      acc += x(n) * Complex(std::cos(phase), std::sin(phase));
    }
    out(k) = acc;
  }
  return out;
}

inline Spectrum dft(const ControlField& field) { return {dft(field.values())}; }

/// |X_k|^2
double power(const Spectrum& spectrum, Eigen::Index k);

}  // namespace qcl
