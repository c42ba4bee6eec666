#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "meanfield/error.hpp"

namespace mfsg {

using json = nlohmann::ordered_json;

/// Flat key-value description of one run. Text form is a JSON object with the
/// reserved keys command/seed/seeds/out followed by the command parameters.
struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 0;
  int repetitions = 1;  // "seeds" in text form
  std::string out = "mfsg-out";
  json params = json::object();

  json to_json() const;
  std::string to_text() const;
  /// Fills defaults and rejects unknown keys or mistyped values.
  static ExperimentConfig from_json(const json& doc);
  static ExperimentConfig from_text(const std::string& text);
};

const std::vector<std::string>& commands();
/// Default parameters of a command, which also fix the accepted keys and their types.
json default_params(const std::string& command);
/// One-line description of each command's CSV outputs.
std::string csv_help(const std::string& command);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void add(std::vector<json> row) { rows.push_back(std::move(row)); }
  std::string to_csv() const;
};

struct RunReport {
  ExperimentConfig config;
  std::string version;
  std::string input_hash;  // git blob hash of the config text
  double wall_clock_seconds = 0.0;
  Table metrics;
  json aggregate = json::object();
  json extra = json::object();
  std::vector<std::string> failed_diagnostics;
  std::vector<std::pair<std::string, std::string>> dumps;  // file name, contents
  std::string summary;

  bool diagnostics_ok() const { return failed_diagnostics.empty(); }
  json to_json() const;
};

RunReport cmd_parisi(const ExperimentConfig& config);
RunReport cmd_iamp(const ExperimentConfig& config);
RunReport cmd_spiked(const ExperimentConfig& config);
RunReport cmd_amp_se(const ExperimentConfig& config);
RunReport cmd_bp(const ExperimentConfig& config);
RunReport cmd_oracle(const ExperimentConfig& config);

/// Dispatches on config.command and stamps version, hash and wall clock.
RunReport run(const ExperimentConfig& config);

/// Writes report.json, metrics.csv and the dumps under config.out.
void write_outputs(const RunReport& report);

std::string git_blob_hash(const std::string& content);

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kResource = 3, kNumeric = 4 };
int exit_code_for(mf::ErrorKind kind);

/// Full command-line entry point.
int main_entry(int argc, char** argv);

}  // namespace mfsg
