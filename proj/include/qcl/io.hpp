#pragma once

#include "qcl/control.hpp"
#include "qcl/models.hpp"
#include "qcl/navigation.hpp"
#include "qcl/optimizer.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace qcl::io {

using json = nlohmann::json;

// {"T": real, "values": [real, ...]}
json to_json(const ControlField& field);
ControlField field_from_json(const json& j);

// {"model": "lz", "delta", "T", "M"} or {"model": "qho", "omega0", "omegaT", "N0", "T", "M"}
json to_json(const Problem& problem);
Problem problem_from_json(const json& j);

json to_json(const OptimizationReport& report);
OptimizationReport report_from_json(const json& j);

// {"zeta", "values", "infidelity", "secondary"}
json to_json(const TrajectorySample& sample);

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double value);

class CsvWriter {
 public:
  /// Writes `# <comment>` then the header row.
  CsvWriter(const std::filesystem::path& path, const std::string& comment, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& cells);

 private:
  std::ofstream out_;
  std::size_t width_;
};

class JsonLinesWriter {
 public:
  /// The first line is {"header": header}.
  JsonLinesWriter(const std::filesystem::path& path, const json& header);

  void write(const json& record);

 private:
  std::ofstream out_;
};

/// Reads a JSON-lines archive of optimization reports, skipping the header line.
std::vector<OptimizationReport> read_archive(const std::filesystem::path& path);

}  // namespace qcl::io
