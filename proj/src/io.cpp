#include "qcl/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace qcl::io {

json to_json(const ControlField& field) {
  const Eigen::VectorXd& v = field.values();
  return json{{"T", field.total_time()}, {"values", std::vector<double>(v.data(), v.data() + v.size())}};
}

ControlField field_from_json(const json& j) {
  const auto values = j.at("values").get<std::vector<double>>();
  return {Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())),
          j.at("T").get<double>()};
}

json to_json(const Problem& problem) {
  if (const auto* lz = std::get_if<LzProblem>(&problem))
    return json{{"model", "lz"}, {"delta", lz->gap}, {"T", lz->duration}, {"M", lz->n_pulses}};
  const auto& q = std::get<QhoProblem>(problem);
  return json{{"model", "qho"}, {"omega0", q.omega_start}, {"omegaT", q.omega_target},
              {"N0", q.n_initial},  {"T", q.duration},         {"M", q.n_pulses}};
}

Problem problem_from_json(const json& j) {
  const std::string model = j.at("model").get<std::string>();
  Problem out;
  if (model == "lz") {
    out = LzProblem{j.value("delta", 1.0), j.at("T").get<double>(), j.at("M").get<int>()};
  } else if (model == "qho") {
    out = QhoProblem{j.value("omega0", 1.0), j.value("omegaT", 1.0), j.at("T").get<double>(), j.at("M").get<int>(),
                     j.value("N0", 0.0)};
  } else {
    throw std::invalid_argument("unknown model '" + model + "' (expected lz or qho)");
  }
  validate(out);
  return out;
}

json to_json(const OptimizationReport& report) {
  json j = to_json(report.field);
  j["final_infidelity"] = report.final_infidelity;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  return j;
}

OptimizationReport report_from_json(const json& j) {
  return {field_from_json(j), j.at("final_infidelity").get<double>(), j.value("iterations", 0),
          j.value("converged", false)};
}

json to_json(const TrajectorySample& sample) {
  const Eigen::VectorXd& v = sample.field.values();
  json j{{"zeta", sample.zeta},
         {"values", std::vector<double>(v.data(), v.data() + v.size())},
         {"infidelity", sample.infidelity}};
  j["secondary"] = sample.secondary ? json(*sample.secondary) : json(nullptr);
  return j;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& comment,
                     const std::vector<std::string>& header)
    : out_(path), width_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  if (!comment.empty()) out_ << "# " << comment << '\n';
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::logic_error("CsvWriter: row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& cells) {
  std::vector<std::string> text;
  text.reserve(cells.size());
  for (double c : cells) text.push_back(format_double(c));
  row(text);
}

JsonLinesWriter::JsonLinesWriter(const std::filesystem::path& path, const json& header) : out_(path) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  write(json{{"header", header}});
}

void JsonLinesWriter::write(const json& record) { out_ << record.dump() << '\n'; }

std::vector<OptimizationReport> read_archive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<OptimizationReport> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j.contains("header")) continue;
    out.push_back(report_from_json(j));
  }
  return out;
}

}  // namespace qcl::io
