#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "rmtlab/config.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/stats.hpp"

namespace rmtlab {

// One row of the flat eigenvalue CSV. lambda is NaN where the experiment
// produces limit-scale values directly (no ambient eigenvalue).
struct EigRow {
  long replication = 0;
  int spike_index = 0;
  int eig_rank = 0;  // 1-based within the spike
  double lambda = 0.0;
  double xi = 0.0;
};

struct NamedKS {
  std::string name;
  std::string reference;  // description of the reference law
  KSReport report;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string version;
  std::string experiment_id;
  double wall_seconds = 0.0;
  long discards = 0;  // pole replications dropped (and logged)
  std::vector<EigRow> rows;
  // Reference samples keyed by the same names as the KS reports.
  std::map<std::string, std::vector<double>> reference;
  std::vector<NamedKS> ks;
  std::map<std::string, Moments> moments;
  nlohmann::json details;  // experiment-specific summaries

  nlohmann::json to_json() const;
};

// Reference law used for one spike of a fluctuation run under the
// auto-selection rule (or an explicit override).
LimitLaw select_limit_law(const ExperimentConfig& cfg, int spike_index);

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers);

// Result JSON to `path`; the flat CSV and the reference CSV go to `path`
// with the extension replaced by .csv and _reference.csv.
void write_result(const ExperimentResult& result, const std::string& path);

void write_flat_csv(const ExperimentResult& result, const std::string& path);
void write_reference_csv(const ExperimentResult& result,
                         const std::string& path);

}  // namespace rmtlab
