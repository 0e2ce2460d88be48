#include "qcl/experiments.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"qcl: navigate quantum control landscapes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  for (const auto& name : qcl::experiment_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file (missing keys take defaults)");
    sub->add_option("--out", out_dir, "output directory");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    nlohmann::json raw = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot read config " + config_path);
      raw = nlohmann::json::parse(in);
    }
    const auto config = qcl::ExperimentConfig::from_json(raw, name);
    std::cout << qcl::run_experiment(name, config, out_dir).dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"command", name}}.dump() << '\n';
    return 1;
  }
  return 0;
}
