#pragma once

#include "qcl/control.hpp"
#include "qcl/landscape.hpp"
#include "qcl/models.hpp"
#include "qcl/navigation.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qcl {

/// Everything a subcommand needs. Missing keys in the config file take the
/// per-experiment defaults of `ExperimentConfig::defaults`.
struct ExperimentConfig {
  std::string experiment = "optimize";
  std::uint64_t seed = 1;
  Problem problem = LzProblem{};

  // seeding and local optimization
  int count = 4000;
  double low = -5.0;
  double high = 5.0;
  double tol = 1e-6;
  int max_iter = 20000;

  // where start solutions come from: inline field, archive file, or generated
  std::optional<ControlField> solution;
  std::optional<std::string> solutions_path;
  int solution_index = 0;
  int solution_count = 1;
  double solution_tol = 1e-20;

  // Hessians and navigation
  std::string hessian_mode = "fd";  // exact | fd | both
  double epsilon = 1e-2;
  std::vector<double> eps_grid;
  NullRule null_rule = NullRule::fixed_rank(2);
  double h = 0.01;
  int steps = 10000;
  double entry_threshold = 1e-6;
  double abort_ceiling = 1e-3;

  // experiment specific
  std::vector<std::vector<int>> kept;
  bool strict_kept = false;
  int directions = 2;
  std::vector<std::string> models;
  std::vector<int> m_grid;
  int fields = 100;
  double min_timing = 1e-3;
  bool self_check = false;

  static ExperimentConfig defaults(const std::string& experiment);
  static ExperimentConfig from_json(const nlohmann::json& j, const std::string& experiment);
  nlohmann::json to_json() const;

  bool operator==(const ExperimentConfig&) const = default;
};

struct BenchmarkRecord {
  std::string model;
  int m;
  double tau_app;
  double tau_ext;
  double eta;  // mean over fields of tau_app / tau_ext
};

/// Mean wall time of one Hessian + eigendecomposition, repeated until the
/// measured span reaches `min_seconds`.
double time_eigenvectors(const Problem& problem, const ControlField& field, const HessianMode& mode,
                         double min_seconds);

BenchmarkRecord benchmark_model(const Problem& problem, const std::vector<ControlField>& fields,
                                const HessianMode& approximate, const HessianMode& reference, double min_seconds);

/// Start points for navigation-type experiments (see ExperimentConfig).
std::vector<ControlField> start_solutions(const ExperimentConfig& config, int how_many);

/// Distance-based loop closure: once the run has moved at least `leave_radius`
/// from its start, the smallest later distance back to the start.
double loop_closure_distance(const Trajectory& trajectory, double leave_radius);

using nlohmann::json;

json run_optimize(const ExperimentConfig& config, const std::filesystem::path& out_dir);
json run_spectrum(const ExperimentConfig& config, const std::filesystem::path& out_dir);
json run_fd_error(const ExperimentConfig& config, const std::filesystem::path& out_dir);
json run_drive(const ExperimentConfig& config, const std::filesystem::path& out_dir);
json run_calibrate(const ExperimentConfig& config, const std::filesystem::path& out_dir);
json run_compress(const ExperimentConfig& config, const std::filesystem::path& out_dir);
json run_benchmark(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Dispatch by subcommand name; throws std::invalid_argument for unknown names.
json run_experiment(const std::string& name, const ExperimentConfig& config, const std::filesystem::path& out_dir);

const std::vector<std::string>& experiment_names();

}  // namespace qcl
