#include "qcl/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcl {

namespace {

using Complex = std::complex<double>;
using Vec2 = Eigen::Vector2cd;
using Row2 = Eigen::RowVector2cd;
using Mat2 = Eigen::Matrix2cd;

constexpr Complex kI{0.0, 1.0};

// Below this |x| the sinc family is summed as a Taylor series.
constexpr double kSeriesCutoff = 0.5;

struct SincJet {
  double value, first, second;
};

// sin(x)/x and its first two derivatives.
SincJet sinc_jet(double x) {
  if (std::abs(x) < kSeriesCutoff) {
    // sinc(x) = sum_n c_n x^(2n), c_n = (-1)^n / (2n+1)!
    SincJet j{1.0, 0.0, 0.0};
    double c = 1.0;
    double lower = 1.0;  // x^(2n-2)
    for (int n = 1; n < 10; ++n) {
      c = -c / ((2.0 * n) * (2.0 * n + 1.0));
      j.second += c * 2.0 * n * (2.0 * n - 1.0) * lower;
      j.first += c * 2.0 * n * lower * x;
      j.value += c * lower * x * x;
      lower *= x * x;
    }
    return j;
  }
  const double s = std::sin(x), c = std::cos(x);
  return {s / x, (x * c - s) / (x * x), ((2.0 - x * x) * s - 2.0 * x * c) / (x * x * x)};
}

// Interval map and its first two derivatives with respect to the amplitude.
struct IntervalJet {
  Mat2 value, first, second;
};

Mat2 lz_hamiltonian(double gap, double omega) {
  Mat2 h;
  h << omega, 0.5 * gap, 0.5 * gap, -omega;
  return h;
}

IntervalJet lz_jet(double gap, double omega, double dt, int order) {
  const double r = std::sqrt(0.25 * gap * gap + omega * omega);
  const double x = r * dt;
  const SincJet sj = sinc_jet(x);
  const double cx = std::cos(x), sx = std::sin(x);
  const Mat2 h = lz_hamiltonian(gap, omega);
  const Mat2 id = Mat2::Identity();

  // U = C I - i S H with C = cos(r dt), S = dt sinc(r dt)
  const double cval = cx, sval = dt * sj.value;
  IntervalJet jet;
  jet.value = cval * id - kI * sval * h;
  if (order < 1) return jet;

  Mat2 sz;
  sz << 1.0, 0.0, 0.0, -1.0;
  const double r1 = omega / r;
  const double r2 = 0.25 * gap * gap / (r * r * r);
  const double c1 = -dt * sx * r1;
  const double s1 = dt * dt * sj.first * r1;
  jet.first = c1 * id - kI * (s1 * h + sval * sz);
  if (order < 2) return jet;

  const double c2 = -dt * dt * cx * r1 * r1 - dt * sx * r2;
  const double s2 = dt * dt * dt * sj.second * r1 * r1 + dt * dt * sj.first * r2;
  jet.second = c2 * id - kI * (s2 * h + 2.0 * s1 * sz);
  return jet;
}

IntervalJet qho_jet(double omega, double dt, int order) {
  const double x = omega * dt;
  const double cx = std::cos(x), sx = std::sin(x);
  const SincJet sj = sinc_jet(x);
  IntervalJet jet;
  jet.value << cx, dt * sj.value, -omega * sx, cx;
  if (order < 1) return jet;
  jet.first << -dt * sx, dt * dt * sj.first, -sx - x * cx, -dt * sx;
  if (order < 2) return jet;
  jet.second << -dt * dt * cx, dt * dt * dt * sj.second, -2.0 * dt * cx + x * dt * sx, -dt * dt * cx;
  return jet;
}

// Both objectives have the form I = |ell^T U_M ... U_1 psi0|^2.
struct Chain {
  Vec2 initial;
  Row2 readout;
  std::vector<IntervalJet> intervals;
};

IntervalJet interval_jet(const Problem& problem, double omega, double dt, int order) {
  if (const auto* lz = std::get_if<LzProblem>(&problem)) return lz_jet(lz->gap, omega, dt, order);
  return qho_jet(omega, dt, order);
}

Chain build_chain(const Problem& problem, const ControlField& field, int order) {
  check_compatible(problem, field);
  const Eigen::VectorXd& w = field.values();
  const double dt = field.dt();
  Chain chain{chain_initial(problem), chain_readout(problem), {}};
  chain.intervals.reserve(static_cast<std::size_t>(w.size()));
  for (Eigen::Index j = 0; j < w.size(); ++j) chain.intervals.push_back(interval_jet(problem, w(j), dt, order));
  return chain;
}

// forward[j] = U_j ... U_1 psi0, backward[j] = ell^T U_M ... U_{j+1}; j = 0..M.
struct Sweeps {
  std::vector<Vec2> forward;
  std::vector<Row2> backward;
  Complex amplitude;
  std::vector<Complex> first;  // d amplitude / d w_j
};

Sweeps run_sweeps(const Chain& chain) {
  const std::size_t m = chain.intervals.size();
  Sweeps s;
  s.forward.resize(m + 1);
  s.backward.resize(m + 1);
  s.forward[0] = chain.initial;
  for (std::size_t j = 0; j < m; ++j) s.forward[j + 1] = chain.intervals[j].value * s.forward[j];
  s.backward[m] = chain.readout;
  for (std::size_t j = m; j > 0; --j) s.backward[j - 1] = s.backward[j] * chain.intervals[j - 1].value;
  s.amplitude = (chain.readout * s.forward[m])(0);
  s.first.resize(m);
  for (std::size_t j = 0; j < m; ++j)
    s.first[j] = (s.backward[j + 1] * chain.intervals[j].first * s.forward[j])(0);
  return s;
}

// H_ij = 2 Re(conj(g_i) g_j + conj(b) d_ij)
double hessian_entry(const Sweeps& s, std::size_t i, std::size_t j, Complex mixed) {
  return 2.0 * (std::conj(s.first[i]) * s.first[j] + std::conj(s.amplitude) * mixed).real();
}

Eigen::MatrixXd hessian_from_chain(const Chain& chain, bool backward_lower) {
  const std::size_t m = chain.intervals.size();
  const Sweeps s = run_sweeps(chain);
  Eigen::MatrixXd h(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  const auto at = [&](std::size_t a, std::size_t b) -> double& {
    return h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  };

  for (std::size_t i = 0; i < m; ++i) {
    const Complex diag = (s.backward[i + 1] * chain.intervals[i].second * s.forward[i])(0);
    at(i, i) = hessian_entry(s, i, i, diag);
    // phi = U_{j-1} ... U_{i+1} U'_i psi_{i-1}
    Vec2 phi = chain.intervals[i].first * s.forward[i];
    for (std::size_t j = i + 1; j < m; ++j) {
      const Complex mixed = (s.backward[j + 1] * chain.intervals[j].first * phi)(0);
      at(i, j) = hessian_entry(s, i, j, mixed);
      if (!backward_lower) at(j, i) = at(i, j);
      phi = chain.intervals[j].value * phi;
    }
  }

  if (backward_lower) {
    for (std::size_t j = m; j-- > 0;) {
      // rho = ell^T U_M ... U_{j+1} U'_j U_{j-1} ... U_{i+1}
      Row2 rho = s.backward[j + 1] * chain.intervals[j].first;
      for (std::size_t i = j; i-- > 0;) {
        const Complex mixed = (rho * chain.intervals[i].first * s.forward[i])(0);
        at(j, i) = 2.0 * (std::conj(s.first[j]) * s.first[i] + std::conj(s.amplitude) * mixed).real();
        rho = rho * chain.intervals[i].value;
      }
    }
  }
  return h;
}

bool close_duration(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

void LzProblem::validate() const {
  if (!(gap > 0.0) || !std::isfinite(gap)) throw std::invalid_argument("LzProblem: gap must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("LzProblem: duration must be positive");
  if (n_pulses < 1) throw std::invalid_argument("LzProblem: n_pulses must be >= 1");
}

void QhoProblem::validate() const {
  if (!(omega_start > 0.0) || !(omega_target > 0.0))
    throw std::invalid_argument("QhoProblem: trap frequencies must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("QhoProblem: duration must be positive");
  if (n_pulses < 1) throw std::invalid_argument("QhoProblem: n_pulses must be >= 1");
  if (!(n_initial >= 0.0)) throw std::invalid_argument("QhoProblem: n_initial must be non-negative");
}

int n_pulses(const Problem& problem) {
  return std::visit([](const auto& p) { return p.n_pulses; }, problem);
}

double duration(const Problem& problem) {
  return std::visit([](const auto& p) { return p.duration; }, problem);
}

void validate(const Problem& problem) {
  std::visit([](const auto& p) { p.validate(); }, problem);
}

void check_compatible(const Problem& problem, const ControlField& field) {
  if (field.size() != n_pulses(problem))
    throw std::invalid_argument("field has " + std::to_string(field.size()) + " amplitudes, problem expects " +
                                std::to_string(n_pulses(problem)));
  if (!close_duration(field.total_time(), duration(problem)))
    throw std::invalid_argument("field duration does not match problem duration");
}

Eigen::Vector2cd chain_initial(const Problem& problem) {
  Vec2 v;
  if (std::holds_alternative<LzProblem>(problem)) {
    v << 1.0, 0.0;
  } else {
    // f(0) = 1/sqrt(2 w0), f'(0) = -i sqrt(w0/2)
    const double w0 = std::get<QhoProblem>(problem).omega_start;
    v << 1.0 / std::sqrt(2.0 * w0), -kI * std::sqrt(0.5 * w0);
  }
  return v;
}

Eigen::RowVector2cd chain_readout(const Problem& problem) {
  Row2 r;
  if (std::holds_alternative<LzProblem>(problem)) {
    r << 1.0, 0.0;  // survival amplitude <0|U|0>
  } else {
    // conj(beta) = (wT f - i f') / sqrt(2 wT)
    const double wt = std::get<QhoProblem>(problem).omega_target;
    r << wt / std::sqrt(2.0 * wt), -kI / std::sqrt(2.0 * wt);
  }
  return r;
}

Eigen::Matrix2cd interval_map(const Problem& problem, double omega, double dt) {
  return interval_jet(problem, omega, dt, 0).value;
}

Eigen::Matrix2cd lz_interval_propagator(double gap, double omega, double dt) {
  return lz_jet(gap, omega, dt, 0).value;
}

Eigen::Matrix2d qho_transfer_matrix(double omega, double dt) {
  return qho_jet(omega, dt, 0).value.real();
}

LzPropagation lz_propagate(const LzProblem& problem, const ControlField& field) {
  problem.validate();
  check_compatible(problem, field);
  Mat2 u = Mat2::Identity();
  const double dt = field.dt();
  for (Eigen::Index j = 0; j < field.size(); ++j)
    u = lz_interval_propagator(problem.gap, field.values()(j), dt) * u;
  return {u, u(1, 0)};
}

double lz_infidelity(const LzProblem& problem, const ControlField& field) {
  return infidelity(Problem{problem}, field);
}

BogoliubovPair qho_propagate(const QhoProblem& problem, const ControlField& field) {
  problem.validate();
  const Chain chain = build_chain(problem, field, 0);
  Vec2 state = chain.initial;
  for (const auto& interval : chain.intervals) state = interval.value * state;
  if (!state.allFinite()) throw std::runtime_error("qho_propagate: non-finite mode function");
  const Complex f = state(0), df = state(1);
  const double wt = problem.omega_target;
  const double norm = std::sqrt(2.0 * wt);
  // a(T) = alpha a(0) + beta a^dag(0) with x(t) = f a + conj(f) a^dag
  return {(wt * f + kI * df) / norm, std::conj(wt * f - kI * df) / norm};
}

double qho_infidelity(const QhoProblem& problem, const ControlField& field) {
  return infidelity(Problem{problem}, field);
}

double particle_number(const QhoProblem& problem, const ControlField& field) {
  const double b2 = std::norm(qho_propagate(problem, field).beta);
  return problem.n_initial * (1.0 + 2.0 * b2) + b2;
}

double infidelity(const Problem& problem, const ControlField& field) {
  check_compatible(problem, field);
  return infidelity(problem, field.values());
}

double infidelity(const Problem& problem, const Eigen::VectorXd& values) {
  if (values.size() != n_pulses(problem)) throw std::invalid_argument("infidelity: dimension mismatch");
  const double dt = duration(problem) / static_cast<double>(values.size());
  Vec2 state;
  Row2 readout;
  if (const auto* lz = std::get_if<LzProblem>(&problem)) {
    state << 1.0, 0.0;
    for (Eigen::Index j = 0; j < values.size(); ++j)
      state = lz_interval_propagator(lz->gap, values(j), dt) * state;
    return std::norm(state(0));
  }
  const auto& q = std::get<QhoProblem>(problem);
  Eigen::Vector2d re(1.0 / std::sqrt(2.0 * q.omega_start), 0.0);
  Eigen::Vector2d im(0.0, -std::sqrt(0.5 * q.omega_start));
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    const Eigen::Matrix2d t = qho_transfer_matrix(values(j), dt);
    re = t * re;
    im = t * im;
  }
  // omega_T f - i f'
  const Complex b(q.omega_target * re(0) + im(1), q.omega_target * im(0) - re(1));
  const double out = std::norm(b) / (2.0 * q.omega_target);
  if (!std::isfinite(out)) throw std::runtime_error("infidelity: non-finite value");
  return out;
}

Eigen::VectorXd exact_gradient(const Problem& problem, const ControlField& field) {
  const Chain chain = build_chain(problem, field, 1);
  const Sweeps s = run_sweeps(chain);
  Eigen::VectorXd g(field.size());
  for (Eigen::Index j = 0; j < g.size(); ++j)
    g(j) = 2.0 * (std::conj(s.amplitude) * s.first[static_cast<std::size_t>(j)]).real();
  return g;
}

Eigen::MatrixXd exact_hessian(const Problem& problem, const ControlField& field) {
  const Eigen::MatrixXd h = hessian_from_chain(build_chain(problem, field, 2), false);
  return 0.5 * (h + h.transpose());
}

Eigen::MatrixXd exact_hessian_unsymmetrized(const Problem& problem, const ControlField& field) {
  return hessian_from_chain(build_chain(problem, field, 2), true);
}

}  // namespace qcl
