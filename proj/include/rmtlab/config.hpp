#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/entry_law.hpp"
#include "rmtlab/limits.hpp"

namespace rmtlab {

enum class ExperimentKind {
  FluctuationVsLimit,
  AsConvergence,
  ResolventLimits,
  SesquilinearCLT,
  EmpiricalVConvergence,
};

const char* experiment_name(ExperimentKind k);
ExperimentKind experiment_from_name(const std::string& name);

// A fully specified run. Loaded from JSON; unknown keys are rejected naming
// the key, so silent typos cannot weaken an experiment.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::FluctuationVsLimit;
  int N = 0;
  int replications = 1;
  double sigma = 1.0;
  std::string law = "gaussian";
  EnsembleField field = EnsembleField::RealSymmetric;
  SpikeSpec spikes;
  std::uint64_t seed = 0;
  double delta = -1.0;  // < 0 means "use the default separation"
  RealDiagConvention real_diag_convention = RealDiagConvention::TheoremTwoOne;
  std::string limit_law = "auto";  // auto | convolution | guoe | frame_v
  bool allow_large_k = false;
  std::string out;  // output path (optional; CLI flag overrides)

  // AsConvergence: |lambda - rho| tolerance.
  double eigen_tolerance = 0.15;
  // ResolventLimits / SesquilinearCLT / EmpiricalVConvergence target.
  int target_spike = 0;
  // SesquilinearCLT: dimension and covariance of the Gaussian test vectors
  // (x = y design). Default covariance is C_ll' = sigma^2 * 0.5^|l-l'|.
  int form_dim = 1;
  Eigen::MatrixXd form_covariance;
  // Reference samples are reference_multiplier x replications draws.
  int reference_multiplier = 10;

  void validate() const;
  EntryLaw entry_law() const { return entry_law_from_name(law, sigma); }
  Eigen::MatrixXd resolved_form_covariance() const;
  double resolved_delta() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Reads and validates a config file. The RMTLAB_SEED environment variable,
// when set, overrides the file's seed (a CLI flag overrides both).
ExperimentConfig load_config(const std::string& path);

}  // namespace rmtlab
