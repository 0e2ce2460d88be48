#include "qcl/control.hpp"

#include <string>

namespace qcl {

FrequencySpec::FrequencySpec(std::vector<int> requested, Eigen::Index dimension, bool strict)
    : requested_(std::move(requested)), dimension_(dimension), strict_(strict) {
  if (dimension_ < 1) throw std::invalid_argument("FrequencySpec: dimension must be >= 1");
  const int m = static_cast<int>(dimension_);
  for (int k : requested_) {
    if (k < 0 || k >= m)
      throw std::out_of_range("FrequencySpec: index " + std::to_string(k) + " outside [0, " +
                              std::to_string(m - 1) + "]");
    kept_.insert(k);
    if (!strict_) kept_.insert((m - k) % m);
  }
  if (!strict_) kept_.insert(0);
}

double power(const Spectrum& spectrum, Eigen::Index k) {
  if (k < 0 || k >= spectrum.size())
    throw std::out_of_range("power: index " + std::to_string(k) + " out of range");
  return std::norm(spectrum.components(k));
}

}  // namespace qcl
