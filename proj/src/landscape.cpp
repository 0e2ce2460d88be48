#include "qcl/landscape.hpp"

#include "qcl/navigation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace qcl {

int HessianSpectrum::null_dimension() const {
  if (!null_mask) throw std::logic_error("HessianSpectrum: not classified");
  return static_cast<int>(std::count(null_mask->begin(), null_mask->end(), true));
}

HessianSpectrum eig_sym(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("eig_sym: matrix is not square");
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument("eig_sym: matrix is not symmetric");
  if (!matrix.allFinite()) throw std::invalid_argument("eig_sym: non-finite entry");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eig_sym: eigensolver did not converge");

  const Eigen::Index m = matrix.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::VectorXd& values = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(values(a)) > std::abs(values(b)); });

  HessianSpectrum out;
  out.eigenvalues.resize(m);
  out.eigenvectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.eigenvalues(i) = values(src);
    out.eigenvectors.col(i) = solver.eigenvectors().col(src);
  }
  return out;
}

HessianSpectrum classify_null(HessianSpectrum spectrum, const NullRule& rule) {
  const Eigen::Index m = spectrum.size();
  std::vector<bool> mask(static_cast<std::size_t>(m), true);
  if (rule.kind == NullRule::Kind::rank) {
    if (rule.rank < 0 || rule.rank > m)
      throw std::invalid_argument("classify_null: rank " + std::to_string(rule.rank) + " exceeds dimension " +
                                  std::to_string(m));
    for (int i = 0; i < rule.rank; ++i) mask[static_cast<std::size_t>(i)] = false;
  } else {
    const double lmax = m > 0 ? std::abs(spectrum.eigenvalues(0)) : 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      mask[static_cast<std::size_t>(i)] = !(std::abs(spectrum.eigenvalues(i)) > rule.tau_rel * lmax);
  }
  spectrum.null_mask = std::move(mask);
  return spectrum;
}

double eigvec_error(const HessianSpectrum& exact, const HessianSpectrum& approx, Eigen::Index i) {
  if (!exact.classified()) throw std::invalid_argument("eigvec_error: exact spectrum not classified");
  if (exact.size() != approx.size()) throw std::invalid_argument("eigvec_error: dimension mismatch");
  if (i < 0 || i >= exact.size()) throw std::out_of_range("eigvec_error: index out of range");
  if (exact.is_null(i)) throw std::invalid_argument("eigvec_error: index lies in the null subspace");
  const double lmax = std::abs(exact.eigenvalues(0));
  for (Eigen::Index k = 0; k < exact.size(); ++k) {
    if (k != i && std::abs(exact.eigenvalues(k) - exact.eigenvalues(i)) <= 1e-9 * lmax)
      throw std::invalid_argument("eigvec_error: eigenvalue " + std::to_string(i) + " is degenerate");
  }
  const double overlap = std::abs(exact.eigenvectors.col(i).dot(approx.eigenvectors.col(i)));
  return std::max(0.0, 1.0 - overlap);
}

Eigen::MatrixXd fd_hessian(const Problem& problem, const ControlField& field, const FdConfig& config) {
  check_compatible(problem, field);
  config.validate();
  using Vec2 = Eigen::Vector2cd;
  using Row2 = Eigen::RowVector2cd;
  const Eigen::VectorXd& w = field.values();
  const auto m = static_cast<std::size_t>(w.size());
  const double dt = field.dt();
  const double eps = config.epsilon;
  const auto shifted = [&](std::size_t j, double shift) {
    return interval_map(problem, w(static_cast<Eigen::Index>(j)) + shift, dt);
  };
  const auto value = [](const Row2& row, const Vec2& state) {
    const double v = std::norm((row * state).value());
    if (!std::isfinite(v)) throw std::domain_error("fd_hessian: non-finite cost at stencil point");
    return v;
  };

  // states[j]: initial state after intervals < j; rows[j]: readout pulled back through intervals >= j
  std::vector<Eigen::Matrix2cd> base(m);
  std::vector<Vec2> states(m + 1);
  std::vector<Row2> rows(m + 1);
  for (std::size_t j = 0; j < m; ++j) base[j] = shifted(j, 0.0);
  states[0] = chain_initial(problem);
  for (std::size_t j = 0; j < m; ++j) states[j + 1] = base[j] * states[j];
  rows[m] = chain_readout(problem);
  for (std::size_t j = m; j > 0; --j) rows[j - 1] = rows[j] * base[j - 1];

  std::vector<Row2> row_up(m), row_down(m);
  for (std::size_t j = 0; j < m; ++j) {
    row_up[j] = rows[j + 1] * shifted(j, eps);
    row_down[j] = rows[j + 1] * shifted(j, -eps);
  }

  const double centre = value(rows[0], states[0]);
  const double denom = 4.0 * eps * eps;
  Eigen::MatrixXd h(w.size(), w.size());
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double up = value(rows[i + 1], shifted(i, 2.0 * eps) * states[i]);
    const double down = value(rows[i + 1], shifted(i, -2.0 * eps) * states[i]);
    h(ii, ii) = (up - 2.0 * centre + down) / denom;

    Vec2 plus = shifted(i, eps) * states[i];
    Vec2 minus = shifted(i, -eps) * states[i];
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double pp = value(row_up[j], plus);
      const double pm = value(row_down[j], plus);
      const double mp = value(row_up[j], minus);
      const double mm = value(row_down[j], minus);
      h(ii, jj) = h(jj, ii) = (pp - pm - mp + mm) / denom;
      plus = base[j] * plus;
      minus = base[j] * minus;
    }
  }
  return h;
}

Eigen::MatrixXd fd_hessian_blackbox(const Problem& problem, const ControlField& field, const FdConfig& config) {
  check_compatible(problem, field);
  return fd_hessian([&](const Eigen::VectorXd& w) { return infidelity(problem, w); }, field.values(), config);
}

Eigen::MatrixXd hessian(const Problem& problem, const ControlField& field, const HessianMode& mode) {
  if (mode.is_exact()) return exact_hessian(problem, field);
  return fd_hessian(problem, field, FdConfig{mode.epsilon});
}

std::vector<CalibrationRow> calibrate_epsilon(const Problem& problem, const ControlField& solution,
                                              const Eigen::VectorXd& direction,
                                              const std::vector<double>& eps_grid,
                                              const CalibrationOptions& options) {
  if (direction.size() != solution.size()) throw std::invalid_argument("calibrate_epsilon: direction dimension");
  if (!(direction.norm() > 0.0)) throw std::invalid_argument("calibrate_epsilon: zero direction");
  const double start = infidelity(problem, solution);
  if (!(start < options.entry_threshold))
    throw std::invalid_argument("calibrate_epsilon: start field is not a solution");

  std::vector<CalibrationRow> rows;
  rows.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    NavigationOptions nav;
    nav.h = options.h;
    nav.steps = options.steps;
    nav.hessian_mode = HessianMode::fd(eps);
    nav.rule = options.rule;
    nav.entry_threshold = options.entry_threshold;
    nav.abort_ceiling = options.abort_ceiling;
    const Trajectory run = navigate(problem, solution, FixedVector{direction}, nav);
    double final_value = run.back().infidelity;
    if (run.status == Trajectory::Status::non_finite || run.status == Trajectory::Status::direction_error ||
        !std::isfinite(final_value))
      final_value = std::numeric_limits<double>::infinity();
    rows.push_back({eps, final_value});
  }
  return rows;
}

}  // namespace qcl
