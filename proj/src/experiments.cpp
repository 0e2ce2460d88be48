#include "qcl/experiments.hpp"

#include "qcl/io.hpp"
#include "qcl/objectives.hpp"
#include "qcl/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qcl {

namespace {

constexpr double lz_short_time = 1.4 * std::numbers::pi / 2.0;
constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

std::vector<double> log_grid(double lo_exp, double hi_exp, double step) {
  std::vector<double> out;
  for (double e = lo_exp; e <= hi_exp + 1e-9; e += step) out.push_back(std::pow(10.0, e));
  return out;
}

std::pair<double, double> default_bounds(const Problem& problem) {
  if (std::holds_alternative<QhoProblem>(problem)) return {0.1, 3.0};
  return {-5.0, 5.0};
}

Problem with_size(Problem problem, double duration, int m) {
  std::visit(
      [&](auto& p) {
        p.duration = duration;
        p.n_pulses = m;
      },
      problem);
  return problem;
}

json null_rule_to_json(const NullRule& rule) {
  if (rule.kind == NullRule::Kind::rank) return json{{"kind", "rank"}, {"rank", rule.rank}};
  return json{{"kind", "threshold"}, {"tau_rel", rule.tau_rel}};
}

NullRule null_rule_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "rank") return NullRule::fixed_rank(j.at("rank").get<int>());
  if (kind == "threshold") return NullRule::threshold(j.value("tau_rel", 1e-6));
  throw std::invalid_argument("null_rule.kind must be rank or threshold");
}

HessianMode single_mode(const ExperimentConfig& config) {
  if (config.hessian_mode == "exact") return HessianMode::exact();
  if (config.hessian_mode == "fd") return HessianMode::fd(config.epsilon);
  throw std::invalid_argument("hessian_mode must be exact or fd for " + config.experiment);
}

NavigationOptions navigation_options(const ExperimentConfig& config, const HessianMode& mode) {
  NavigationOptions nav;
  nav.h = config.h;
  nav.steps = config.steps;
  nav.hessian_mode = mode;
  nav.rule = config.null_rule;
  nav.entry_threshold = config.entry_threshold;
  nav.abort_ceiling = config.abort_ceiling;
  return nav;
}

std::string csv_comment(const ExperimentConfig& config) {
  return "qcl " + config.experiment + " seed=" + std::to_string(config.seed);
}

json header(const ExperimentConfig& config) {
  return json{{"command", config.experiment}, {"seed", config.seed}, {"config", config.to_json()}};
}

json trajectory_summary(const Trajectory& run) {
  double max_infidelity = 0.0;
  for (const auto& s : run.samples) max_infidelity = std::max(max_infidelity, s.infidelity);
  json j{{"status", to_string(run.status)},
         {"samples", run.samples.size()},
         {"zeta_end", run.back().zeta},
         {"max_infidelity", max_infidelity},
         {"max_step_increase", run.max_step_increase}};
  if (!run.message.empty()) j["message"] = run.message;
  return j;
}

void write_trajectory(const std::filesystem::path& path, const ExperimentConfig& config, const Trajectory& run,
                      const json& extra = json::object()) {
  json head = header(config);
  head["hessian_mode"] = run.hessian_mode.is_exact() ? "exact" : "fd";
  head["epsilon"] = run.hessian_mode.epsilon;
  head["status"] = to_string(run.status);
  head.update(extra);
  io::JsonLinesWriter out(path, head);
  for (const auto& s : run.samples) out.write(io::to_json(s));
}

std::string join(const std::vector<int>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + std::to_string(v[i]);
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return nan_value;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "optimize" || experiment == "spectrum" || experiment == "drive") {
    c.problem = LzProblem{1.0, lz_short_time, 3};
    if (experiment == "spectrum") c.solution_count = 100;
    if (experiment == "drive") {
      c.hessian_mode = "fd";
      c.epsilon = 1e-2;
      c.h = 0.01;
      c.steps = 10000;
    }
  } else if (experiment == "fd-error") {
    c.problem = QhoProblem{1.0, 1.0, 1.8, 6, 0.0};
    c.solution_count = 100;
    c.eps_grid = log_grid(-8.0, 0.0, 0.5);
    c.hessian_mode = "fd";
  } else if (experiment == "calibrate") {
    c.problem = QhoProblem{1.0, 1.0, 1.8, 6, 0.0};
    c.steps = 1000;
    c.h = 0.1;
    c.directions = 2;
    c.eps_grid = log_grid(-14.0, 0.0, 1.0);
  } else if (experiment == "compress") {
    c.problem = QhoProblem{1.0, 1.0, 1.8, 48, 0.0};
    c.kept = {{1, 2}, {1}};
    c.h = 0.002;
    c.steps = 500;
    c.epsilon = 1e-3;
    c.hessian_mode = "both";
  } else if (experiment == "benchmark") {
    c.problem = LzProblem{1.0, 1.8, 3};
    c.models = {"lz", "qho"};
    c.m_grid = {3, 6, 12, 24, 48};
    c.fields = 100;
  } else {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  std::tie(c.low, c.high) = default_bounds(c.problem);
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const json& j, const std::string& experiment) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  const std::string name = j.value("experiment", experiment);
  if (name != experiment)
    throw std::invalid_argument("config is for '" + name + "', not '" + experiment + "'");
  ExperimentConfig c = defaults(experiment);

  bool model_changed = false;
  if (j.contains("problem")) {
    json merged = io::to_json(c.problem);
    const json& user = j.at("problem");
    if (user.contains("model") && user.at("model") != merged.at("model")) {
      merged = json{{"model", user.at("model")}, {"T", merged.at("T")}, {"M", merged.at("M")}};
      model_changed = true;
    }
    merged.update(user);
    c.problem = io::problem_from_json(merged);
  }
  if (model_changed) std::tie(c.low, c.high) = default_bounds(c.problem);

  const auto read = [&](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  read("seed", c.seed);
  read("count", c.count);
  read("low", c.low);
  read("high", c.high);
  read("tol", c.tol);
  read("max_iter", c.max_iter);
  if (j.contains("solution") && !j.at("solution").is_null()) c.solution = io::field_from_json(j.at("solution"));
  if (j.contains("solutions") && !j.at("solutions").is_null())
    c.solutions_path = j.at("solutions").get<std::string>();
  read("solution_index", c.solution_index);
  read("solution_count", c.solution_count);
  read("solution_tol", c.solution_tol);
  read("hessian_mode", c.hessian_mode);
  read("epsilon", c.epsilon);
  read("eps_grid", c.eps_grid);
  if (j.contains("null_rule")) c.null_rule = null_rule_from_json(j.at("null_rule"));
  read("h", c.h);
  read("steps", c.steps);
  read("entry_threshold", c.entry_threshold);
  read("abort_ceiling", c.abort_ceiling);
  read("kept", c.kept);
  read("strict_kept", c.strict_kept);
  read("directions", c.directions);
  read("models", c.models);
  read("m_grid", c.m_grid);
  read("fields", c.fields);
  read("min_timing", c.min_timing);
  read("self_check", c.self_check);

  if (c.hessian_mode != "exact" && c.hessian_mode != "fd" && c.hessian_mode != "both")
    throw std::invalid_argument("hessian_mode must be exact, fd or both");
  if (c.solution_index < 0) throw std::invalid_argument("solution_index must be >= 0");
  if (c.solution_count < 1) throw std::invalid_argument("solution_count must be >= 1");
  if (c.steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (c.directions < 1) throw std::invalid_argument("directions must be >= 1");
  if (c.fields < 1) throw std::invalid_argument("fields must be >= 1");
  return c;
}

json ExperimentConfig::to_json() const {
  json j{{"experiment", experiment},
         {"seed", seed},
         {"problem", io::to_json(problem)},
         {"count", count},
         {"low", low},
         {"high", high},
         {"tol", tol},
         {"max_iter", max_iter},
         {"solution", solution ? io::to_json(*solution) : json(nullptr)},
         {"solutions", solutions_path ? json(*solutions_path) : json(nullptr)},
         {"solution_index", solution_index},
         {"solution_count", solution_count},
         {"solution_tol", solution_tol},
         {"hessian_mode", hessian_mode},
         {"epsilon", epsilon},
         {"eps_grid", eps_grid},
         {"null_rule", null_rule_to_json(null_rule)},
         {"h", h},
         {"steps", steps},
         {"entry_threshold", entry_threshold},
         {"abort_ceiling", abort_ceiling},
         {"kept", kept},
         {"strict_kept", strict_kept},
         {"directions", directions},
         {"models", models},
         {"m_grid", m_grid},
         {"fields", fields},
         {"min_timing", min_timing},
         {"self_check", self_check}};
  return j;
}

double time_eigenvectors(const Problem& problem, const ControlField& field, const HessianMode& mode,
                         double min_seconds) {
  using clock = std::chrono::steady_clock;
  double sink = 0.0;
  for (long reps = 1;; reps *= 2) {
    const auto t0 = clock::now();
    for (long r = 0; r < reps; ++r) sink += eig_sym(hessian(problem, field, mode)).eigenvectors(0, 0);
    const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    if (elapsed >= min_seconds || reps >= (1L << 30)) {
      if (!std::isfinite(sink)) throw std::runtime_error("time_eigenvectors: non-finite spectrum");
      return elapsed / static_cast<double>(reps);
    }
  }
}

BenchmarkRecord benchmark_model(const Problem& problem, const std::vector<ControlField>& fields,
                                const HessianMode& approximate, const HessianMode& reference, double min_seconds) {
  if (fields.empty()) throw std::invalid_argument("benchmark_model: no fields");
  double app = 0.0, ext = 0.0, ratio = 0.0;
  for (const auto& field : fields) {
    const double a = time_eigenvectors(problem, field, approximate, min_seconds);
    const double e = time_eigenvectors(problem, field, reference, min_seconds);
    app += a;
    ext += e;
    ratio += a / e;
  }
  const double n = static_cast<double>(fields.size());
  return {std::holds_alternative<LzProblem>(problem) ? "lz" : "qho", n_pulses(problem), app / n, ext / n, ratio / n};
}

std::vector<ControlField> start_solutions(const ExperimentConfig& config, int how_many) {
  const Problem& problem = config.problem;
  const auto accept = [&](const ControlField& f) {
    return f.size() == n_pulses(problem) && infidelity(problem, make_field(problem, f.values())) < config.entry_threshold;
  };

  std::vector<ControlField> out;
  if (config.solution) {
    check_compatible(problem, *config.solution);
    if (!accept(*config.solution))
      throw std::invalid_argument("inline solution is not below the entry threshold " +
                                  io::format_double(config.entry_threshold));
    out.push_back(*config.solution);
    return out;
  }

  if (config.solutions_path) {
    int skipped = 0;
    for (const auto& report : io::read_archive(*config.solutions_path)) {
      if (!accept(report.field)) continue;
      if (skipped++ < config.solution_index) continue;
      out.push_back(make_field(problem, report.field.values()));
      if (static_cast<int>(out.size()) == how_many) break;
    }
    if (out.empty()) throw std::runtime_error("no usable solutions in " + *config.solutions_path);
    return out;
  }

  SeedSpec spec{config.count, config.low, config.high, config.seed};
  MinimizeOptions opt;
  opt.tol = config.solution_tol;
  opt.max_iter = config.max_iter;
  opt.threshold = config.entry_threshold;
  int skipped = 0;
  for (const auto& seed : sample_seeds(spec, problem)) {
    const OptimizationReport report = minimize(problem, seed, opt);
    if (!report.converged) continue;
    if (skipped++ < config.solution_index) continue;
    out.push_back(report.field);
    if (static_cast<int>(out.size()) == how_many) break;
  }
  if (out.empty())
    throw std::runtime_error("no seed out of " + std::to_string(config.count) +
                             " converged below the entry threshold; the target may be unreachable at this T");
  return out;
}

double loop_closure_distance(const Trajectory& trajectory, double leave_radius) {
  const Eigen::VectorXd& start = trajectory.samples.front().field.values();
  bool left = false;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : trajectory.samples) {
    const double d = (s.field.values() - start).norm();
    if (!left) {
      left = d >= leave_radius;
      continue;
    }
    best = std::min(best, d);
  }
  return best;
}

json run_optimize(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const SeedSpec spec{config.count, config.low, config.high, config.seed};
  const auto seeds = sample_seeds(spec, config.problem);
  MinimizeOptions opt;
  opt.tol = config.tol;
  opt.max_iter = config.max_iter;
  opt.threshold = config.entry_threshold;

  const int m = n_pulses(config.problem);
  std::vector<std::string> columns{"seed", "final_infidelity", "iterations", "converged"};
  for (int j = 1; j <= m; ++j) columns.push_back("omega_" + std::to_string(j));
  io::CsvWriter scatter(out_dir / "scatter.csv", csv_comment(config), columns);
  io::JsonLinesWriter archive(out_dir / "solutions.jsonl", header(config));

  int converged = 0;
  std::vector<double> finals;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const OptimizationReport report = minimize(config.problem, seeds[i], opt);
    converged += report.converged;
    finals.push_back(report.final_infidelity);
    archive.write(io::to_json(report));
    std::vector<std::string> row{std::to_string(i), io::format_double(report.final_infidelity),
                                 std::to_string(report.iterations), report.converged ? "1" : "0"};
    for (int j = 0; j < m; ++j) row.push_back(io::format_double(report.field.values()(j)));
    scatter.row(row);
  }
  return json{{"seeds", seeds.size()},
              {"converged", converged},
              {"min_infidelity", *std::min_element(finals.begin(), finals.end())},
              {"median_infidelity", median(finals)}};
}

json run_spectrum(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const auto solutions = start_solutions(config, config.solution_count);
  io::CsvWriter csv(out_dir / "spectrum.csv", csv_comment(config),
                    {"solution", "index", "eigenvalue", "relative", "null"});
  int rank_max = 0, rank_min = std::numeric_limits<int>::max(), rank8_max = 0;
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    const HessianSpectrum spec = classify_null(eig_sym(exact_hessian(config.problem, solutions[s])), config.null_rule);
    const double lmax = std::abs(spec.eigenvalues(0));
    int rank6 = 0, rank8 = 0;
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
      const double rel = lmax > 0 ? std::abs(spec.eigenvalues(i)) / lmax : 0.0;
      rank6 += rel > 1e-6;
      rank8 += rel > 1e-8;
      csv.row(std::vector<std::string>{std::to_string(s), std::to_string(i + 1), io::format_double(spec.eigenvalues(i)),
                                       io::format_double(rel), spec.is_null(i) ? "1" : "0"});
    }
    rank_max = std::max(rank_max, rank6);
    rank_min = std::min(rank_min, rank6);
    rank8_max = std::max(rank8_max, rank8);
  }
  return json{{"solutions", solutions.size()},
              {"min_rank_1e-6", rank_min},
              {"max_rank_1e-6", rank_max},
              {"max_rank_1e-8", rank8_max}};
}

json run_fd_error(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  if (config.eps_grid.empty()) throw std::invalid_argument("eps_grid is empty");
  const auto solutions = start_solutions(config, config.solution_count);
  const bool self = config.self_check || config.hessian_mode == "exact";

  std::vector<HessianSpectrum> exact;
  for (const auto& s : solutions)
    exact.push_back(classify_null(eig_sym(exact_hessian(config.problem, s)), config.null_rule));
  const int width = exact.front().non_null_count();

  std::vector<std::string> columns{"epsilon"};
  for (int i = 1; i <= width; ++i) columns.push_back("E_" + std::to_string(i));
  io::CsvWriter first(out_dir / "fd_error.csv", csv_comment(config), columns);
  io::CsvWriter all(out_dir / "fd_error_all.csv", csv_comment(config), {"solution", "epsilon", "index", "error"});

  // worst[s][e]: max over non-null indices
  std::vector<std::vector<double>> worst(solutions.size(), std::vector<double>(config.eps_grid.size(), nan_value));
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    for (std::size_t e = 0; e < config.eps_grid.size(); ++e) {
      const double eps = config.eps_grid[e];
      const HessianMode mode = self ? HessianMode::exact() : HessianMode::fd(eps);
      std::vector<double> errs;
      try {
        const HessianSpectrum approx = eig_sym(hessian(config.problem, solutions[s], mode));
        for (Eigen::Index i = 0; i < exact[s].size(); ++i) {
          if (exact[s].is_null(i)) continue;
          double err = nan_value;
          try {
            err = eigvec_error(exact[s], approx, i);
          } catch (const std::invalid_argument&) {
          }
          errs.push_back(err);
        }
      } catch (const std::exception&) {
        errs.assign(static_cast<std::size_t>(exact[s].non_null_count()), nan_value);
      }
      double w = 0.0;
      for (std::size_t i = 0; i < errs.size(); ++i) {
        w = std::isnan(errs[i]) || std::isnan(w) ? nan_value : std::max(w, errs[i]);
        all.row(std::vector<double>{static_cast<double>(s), eps, static_cast<double>(i + 1), errs[i]});
      }
      worst[s][e] = w;
      if (s == 0) {
        std::vector<double> row{eps};
        errs.resize(static_cast<std::size_t>(width), nan_value);
        row.insert(row.end(), errs.begin(), errs.end());
        first.row(row);
      }
    }
  }

  json per_eps = json::array();
  for (std::size_t e = 0; e < config.eps_grid.size(); ++e) {
    std::vector<double> col;
    for (const auto& w : worst)
      if (!std::isnan(w[e])) col.push_back(w[e]);
    per_eps.push_back({{"epsilon", config.eps_grid[e]}, {"median_max_error", median(col)}});
  }
  int below = 0;
  for (const auto& w : worst) {
    double best = std::numeric_limits<double>::infinity();
    for (double v : w)
      if (!std::isnan(v)) best = std::min(best, v);
    below += best < 1e-8;
  }
  return json{{"solutions", solutions.size()}, {"non_null", width}, {"min_error_below_1e-8", below},
              {"per_epsilon", per_eps}};
}

json run_drive(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const ControlField start = start_solutions(config, 1).front();
  Trajectory run;
  if (config.steps == 0) {
    run.samples.push_back({0.0, start, infidelity(config.problem, start), std::nullopt});
    run.hessian_mode = single_mode(config);
  } else {
    run = navigate(config.problem, start, NullFollow{}, navigation_options(config, single_mode(config)));
  }
  write_trajectory(out_dir / "trajectory.jsonl", config, run);

  double min_cos = 1.0;
  for (std::size_t k = 2; k < run.samples.size(); ++k) {
    const Eigen::VectorXd d0 = run.samples[k - 1].field.values() - run.samples[k - 2].field.values();
    const Eigen::VectorXd d1 = run.samples[k].field.values() - run.samples[k - 1].field.values();
    const double n = d0.norm() * d1.norm();
    if (n > 0) min_cos = std::min(min_cos, d0.dot(d1) / n);
  }
  json summary = trajectory_summary(run);
  summary["loop_closure"] = loop_closure_distance(run, 0.5);
  summary["min_direction_cosine"] = min_cos;
  return summary;
}

json run_calibrate(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  if (config.eps_grid.empty()) throw std::invalid_argument("eps_grid is empty");
  const ControlField solution = start_solutions(config, 1).front();
  const SeedSpec dspec{config.directions, -1.0, 1.0, config.seed + 0x9e3779b97f4a7c15ULL};
  CalibrationOptions options;
  options.steps = config.steps;
  options.h = config.h;
  options.rule = config.null_rule;
  options.entry_threshold = config.entry_threshold;
  options.abort_ceiling = config.abort_ceiling;

  json runs = json::array();
  int k = 0;
  for (const auto& draw : sample_seeds(dspec, config.problem)) {
    ++k;
    const Eigen::VectorXd direction = draw.values().normalized();
    const auto rows = calibrate_epsilon(config.problem, solution, direction, config.eps_grid, options);
    io::CsvWriter csv(out_dir / ("calibration_" + std::to_string(k) + ".csv"), csv_comment(config),
                      {"epsilon", "final_infidelity"});
    json best{{"epsilon", nullptr}, {"final_infidelity", nullptr}};
    double best_value = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      csv.row(std::vector<double>{r.epsilon, r.final_infidelity});
      if (r.final_infidelity < best_value) {
        best_value = r.final_infidelity;
        best = {{"epsilon", r.epsilon}, {"final_infidelity", r.final_infidelity}};
      }
    }
    runs.push_back({{"direction", k}, {"best", best}});
  }
  return json{{"directions", runs}};
}

json run_compress(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  if (config.kept.empty()) throw std::invalid_argument("kept: no frequency presets");
  const auto starts = start_solutions(config, config.solution_count);
  if (starts.empty()) throw std::invalid_argument("compress: empty solution set");
  const int m = n_pulses(config.problem);

  std::vector<std::pair<std::string, HessianMode>> modes;
  if (config.hessian_mode != "fd") modes.emplace_back("exact", HessianMode::exact());
  if (config.hessian_mode != "exact") modes.emplace_back("fd", HessianMode::fd(config.epsilon));

  json results = json::array();
  for (const auto& preset : config.kept) {
    const FourierObjective objective(FrequencySpec(preset, m, config.strict_kept));
    const std::string tag = "p" + join(preset, "-");
    for (std::size_t s = 0; s < starts.size(); ++s) {
      const double c0 = objective.cost(starts[s].values());
      std::vector<Trajectory> runs;
      for (const auto& [name, mode] : modes) {
        const Trajectory run = compress(config.problem, starts[s], objective, navigation_options(config, mode));
        const std::string stem = "compress_" + tag + "_s" + std::to_string(s) + "_" + name;
        write_trajectory(out_dir / (stem + ".jsonl"), config, run, json{{"kept", preset}});

        io::CsvWriter protocols(out_dir / (stem + "_protocols.csv"), csv_comment(config),
                                {"zeta", "interval", "omega"});
        const std::size_t stride = std::max<std::size_t>(1, run.samples.size() / 10);
        for (std::size_t k = 0; k < run.samples.size(); ++k) {
          if (k % stride != 0 && k + 1 != run.samples.size()) continue;
          for (int j = 0; j < m; ++j)
            protocols.row(std::vector<double>{run.samples[k].zeta, static_cast<double>(j + 1),
                                              run.samples[k].field.values()(j)});
        }

        bool monotone = true;
        for (std::size_t k = 1; k < run.samples.size(); ++k)
          monotone = monotone && *run.samples[k].secondary <= *run.samples[k - 1].secondary + 1e-12 * std::max(1.0, c0);
        json r = trajectory_summary(run);
        r["kept"] = preset;
        r["start"] = s;
        r["mode"] = name;
        r["initial_cost"] = c0;
        r["final_cost_ratio"] = c0 > 0 ? *run.back().secondary / c0 : 0.0;
        r["monotone"] = monotone;
        results.push_back(r);
        runs.push_back(run);
      }
      if (runs.size() == 2) {
        io::CsvWriter cmp(out_dir / ("compress_" + tag + "_s" + std::to_string(s) + "_compare.csv"),
                          csv_comment(config), {"zeta", "cost_exact", "cost_fd", "infidelity_exact", "infidelity_fd"});
        const std::size_t n = std::min(runs[0].samples.size(), runs[1].samples.size());
        double gap = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const auto& a = runs[0].samples[k];
          const auto& b = runs[1].samples[k];
          cmp.row(std::vector<double>{a.zeta, *a.secondary, *b.secondary, a.infidelity, b.infidelity});
          gap = std::max(gap, std::abs(*a.secondary - *b.secondary));
        }
        results.push_back({{"kept", preset}, {"start", s}, {"max_cost_gap", gap},
                           {"max_cost_gap_relative", c0 > 0 ? gap / c0 : gap}});
      }
    }
  }
  return json{{"runs", results}};
}

json run_benchmark(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  if (config.models.empty() || config.m_grid.empty()) throw std::invalid_argument("benchmark: empty models or m_grid");
  const HessianMode approximate = config.self_check ? HessianMode::exact() : HessianMode::fd(config.epsilon);
  io::CsvWriter csv(out_dir / "benchmark.csv", csv_comment(config), {"model", "M", "tau_app", "tau_ext", "eta"});
  json rows = json::array();
  for (const auto& model : config.models) {
    for (int m : config.m_grid) {
      json pj{{"model", model}, {"T", duration(config.problem)}, {"M", m}};
      if (model == io::to_json(config.problem).at("model")) pj = io::to_json(with_size(config.problem, duration(config.problem), m));
      const Problem problem = io::problem_from_json(pj);
      double lo = config.low, hi = config.high;
      if (model != io::to_json(config.problem).at("model")) std::tie(lo, hi) = default_bounds(problem);
      const auto fields = sample_seeds(SeedSpec{config.fields, lo, hi, config.seed}, problem);
      const BenchmarkRecord r = benchmark_model(problem, fields, approximate, HessianMode::exact(), config.min_timing);
      csv.row(std::vector<std::string>{r.model, std::to_string(r.m), io::format_double(r.tau_app),
                                       io::format_double(r.tau_ext), io::format_double(r.eta)});
      rows.push_back({{"model", r.model}, {"M", r.m}, {"eta", r.eta}});
    }
  }
  return json{{"rows", rows}};
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"optimize", "spectrum", "fd-error", "drive",
                                              "calibrate", "compress", "benchmark"};
  return names;
}

json run_experiment(const std::string& name, const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  json summary;
  if (name == "optimize") summary = run_optimize(config, out_dir);
  else if (name == "spectrum") summary = run_spectrum(config, out_dir);
  else if (name == "fd-error") summary = run_fd_error(config, out_dir);
  else if (name == "drive") summary = run_drive(config, out_dir);
  else if (name == "calibrate") summary = run_calibrate(config, out_dir);
  else if (name == "compress") summary = run_compress(config, out_dir);
  else if (name == "benchmark") summary = run_benchmark(config, out_dir);
  else throw std::invalid_argument("unknown experiment '" + name + "'");
  return json{{"command", name}, {"seed", config.seed}, {"out", out_dir.string()}, {"summary", summary}};
}

}  // namespace qcl
