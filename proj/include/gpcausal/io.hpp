#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpcausal/estimands.hpp"
#include "gpcausal/mcmc.hpp"
#include "gpcausal/model.hpp"
#include "gpcausal/simulation.hpp"

namespace gpcausal {

// How each ingested covariate column was mapped into model space. Continuous
// columns are centered/scaled; columns with two distinct values are coded
// 0/1 (low -> 0). destandardize() inverts the mapping exactly.
struct ColumnEncoding {
  std::string name;
  bool binary = false;
  double mean = 0.0;   // continuous columns
  double sd = 1.0;
  double low = 0.0;    // binary columns: original values
  double high = 1.0;
};

struct Standardization {
  std::vector<ColumnEncoding> columns;
  Eigen::MatrixXd destandardize(const Eigen::MatrixXd& x) const;
};

struct ColumnSelection {
  std::string outcome;
  std::string treatment;
  std::vector<std::string> covariates;
};

struct IngestResult {
  Dataset data;
  Standardization standardization;
  std::string digest;  // FNV-1a 64 of the raw file bytes, hex
};

IngestResult ingest_csv(const std::string& path, const ColumnSelection& columns,
                        OutcomeType mode);

std::string file_digest(const std::string& path);

// Doubles are printed with 17 significant digits so tables round-trip
// bit-exactly.
std::string format_double(double v);

// Flat key=value files (config, scenario specs, manifests). Lines starting
// with '#' and blank lines are ignored.
using KeyValueMap = std::map<std::string, std::string>;
KeyValueMap read_key_value_file(const std::string& path);
void write_key_value_file(const std::string& path, const std::vector<std::pair<std::string, std::string>>& entries);

struct FitRequest {
  std::string input_path;
  ColumnSelection columns;
  OutcomeType mode = OutcomeType::continuous;
  HyperPriorConfig hyper;
  McmcConfig mcmc;
  std::string output_dir = ".";
};

// Output files written by `fit`: draws.csv, ate_summary.csv, subjects.csv,
// manifest.txt under request.output_dir.
struct FitOutputs {
  std::string draws_path;
  std::string summary_path;
  std::string subjects_path;
  std::string manifest_path;
};

FitOutputs run_fit(const FitRequest& request);

// Reconstructs the FitRequest a manifest records (output dir excluded).
FitRequest fit_request_from_manifest(const std::string& manifest_path);

ScenarioSpec scenario_from_file(const std::string& path);

struct SimulateOutputs {
  std::string report_path;
  std::string detail_path;
  std::string manifest_path;
};

SimulateOutputs run_simulate(const std::string& spec_path, const std::string& output_dir);

}  // namespace gpcausal
