#include "rmtlab/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "rmtlab/errors.hpp"
#include "rmtlab/spectral.hpp"

namespace rmtlab {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const char* where) {
  if (!j.is_object()) {
    throw ParameterError(std::string(where) + " must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw ParameterError(std::string("unknown config key '") + key +
                           "' in " + where);
    }
  }
}

Spike spike_from_json(const json& j) {
  check_keys(j, {"theta", "multiplicity", "geometry", "K", "frame"}, "spike");
  Spike s;
  if (!j.contains("theta")) throw ParameterError("spike needs 'theta'");
  s.theta = j.at("theta").get<double>();
  s.multiplicity = j.value("multiplicity", 1);
  const std::string geom = j.value("geometry", std::string("canonical"));
  if (geom == "canonical") {
    s.geometry = SpikeGeometry::Canonical;
    if (j.contains("K") || j.contains("frame")) {
      throw ParameterError("canonical spike takes no 'K' or 'frame'");
    }
  } else if (geom == "spread_uniform") {
    s.geometry = SpikeGeometry::SpreadUniform;
    if (!j.contains("K")) throw ParameterError("spread spike needs 'K'");
    s.spread_dim = j.at("K").get<int>();
  } else if (geom == "explicit") {
    s.geometry = SpikeGeometry::ExplicitFrame;
    if (!j.contains("frame")) throw ParameterError("explicit spike needs 'frame'");
    const json& rows = j.at("frame");
    if (!rows.is_array() || rows.empty()) {
      throw ParameterError("explicit frame must be an array of rows");
    }
    const std::size_t K = rows.size();
    const std::size_t k = rows.front().size();
    Eigen::MatrixXcd frame(K, k);
    for (std::size_t i = 0; i < K; ++i) {
      const json& row = rows[i];
      if (!row.is_array() || row.size() != k) {
        throw ParameterError("explicit frame rows must have equal length");
      }
      for (std::size_t p = 0; p < k; ++p) {
        const json& e = row[p];
        if (e.is_number()) {
          frame(i, p) = e.get<double>();
        } else if (e.is_array() && e.size() == 2) {
          frame(i, p) =
              std::complex<double>(e[0].get<double>(), e[1].get<double>());
        } else {
          throw ParameterError(
              "frame entries must be numbers or [re, im] pairs");
        }
      }
    }
    s.frame = std::move(frame);
  } else {
    throw ParameterError("unknown spike geometry '" + geom + "'");
  }
  return s;
}

json spike_to_json(const Spike& s) {
  json j;
  j["theta"] = s.theta;
  j["multiplicity"] = s.multiplicity;
  switch (s.geometry) {
    case SpikeGeometry::Canonical:
      j["geometry"] = "canonical";
      break;
    case SpikeGeometry::SpreadUniform:
      j["geometry"] = "spread_uniform";
      j["K"] = s.spread_dim;
      break;
    case SpikeGeometry::ExplicitFrame: {
      j["geometry"] = "explicit";
      json rows = json::array();
      bool real = true;
      for (Eigen::Index i = 0; i < s.frame.rows(); ++i) {
        for (Eigen::Index p = 0; p < s.frame.cols(); ++p) {
          if (s.frame(i, p).imag() != 0.0) real = false;
        }
      }
      for (Eigen::Index i = 0; i < s.frame.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index p = 0; p < s.frame.cols(); ++p) {
          if (real) {
            row.push_back(s.frame(i, p).real());
          } else {
            row.push_back({s.frame(i, p).real(), s.frame(i, p).imag()});
          }
        }
        rows.push_back(std::move(row));
      }
      j["frame"] = std::move(rows);
      break;
    }
  }
  return j;
}

}  // namespace

const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::FluctuationVsLimit:
      return "fluctuation_vs_limit";
    case ExperimentKind::AsConvergence:
      return "as_convergence";
    case ExperimentKind::ResolventLimits:
      return "resolvent_limits";
    case ExperimentKind::SesquilinearCLT:
      return "sesquilinear_clt";
    case ExperimentKind::EmpiricalVConvergence:
      return "empirical_v_convergence";
  }
  return "unknown";
}

ExperimentKind experiment_from_name(const std::string& name) {
  if (name == "fluctuation_vs_limit") return ExperimentKind::FluctuationVsLimit;
  if (name == "as_convergence") return ExperimentKind::AsConvergence;
  if (name == "resolvent_limits") return ExperimentKind::ResolventLimits;
  if (name == "sesquilinear_clt") return ExperimentKind::SesquilinearCLT;
  if (name == "empirical_v_convergence") {
    return ExperimentKind::EmpiricalVConvergence;
  }
  throw ParameterError("unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (N < 50) throw ParameterError("N must be >= 50");
  if (replications < 1) throw ParameterError("replications must be >= 1");
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  entry_law_from_name(law, sigma);  // throws on bad name
  spikes.validate();
  if (spikes.spikes.empty()) {
    throw ParameterError("at least one spike is required");
  }
  if (spikes.supercritical_count(sigma) == 0) {
    throw ParameterError("at least one spike with theta > sigma is required");
  }
  const int k = spikes.frame_total(sigma);
  const int cap = static_cast<int>(std::floor(std::pow(double(N), 0.49)));
  if (!allow_large_k && k > cap) {
    throw ParameterError(
        "total supercritical frame dimension k = " + std::to_string(k) +
        " exceeds N^0.49 = " + std::to_string(cap) +
        "; the asymptotics assume k << sqrt(N) (set allow_large_k to "
        "override)");
  }
  if (spikes.frame_dim_total() > N) {
    throw ParameterError("spike frames exceed matrix dimension");
  }
  if (limit_law != "auto" && limit_law != "convolution" &&
      limit_law != "guoe" && limit_law != "frame_v") {
    throw ParameterError("limit_law must be auto|convolution|guoe|frame_v");
  }
  if (!(eigen_tolerance > 0.0)) {
    throw ParameterError("eigen_tolerance must be positive");
  }
  if (target_spike < 0 ||
      target_spike >= static_cast<int>(spikes.spikes.size())) {
    throw ParameterError("target_spike out of range");
  }
  if (experiment == ExperimentKind::ResolventLimits ||
      experiment == ExperimentKind::SesquilinearCLT ||
      experiment == ExperimentKind::EmpiricalVConvergence) {
    if (!(spikes.spikes[static_cast<std::size_t>(target_spike)].theta >
          sigma)) {
      throw ParameterError("target spike must satisfy theta > sigma");
    }
  }
  if (experiment == ExperimentKind::SesquilinearCLT) {
    if (field != EnsembleField::RealSymmetric) {
      throw ParameterError(
          "sesquilinear experiment is implemented for the real field");
    }
    if (form_dim < 1) throw ParameterError("form_dim must be >= 1");
    if (form_covariance.size() != 0 &&
        (form_covariance.rows() != form_dim ||
         form_covariance.cols() != form_dim)) {
      throw ParameterError("form_covariance must be form_dim x form_dim");
    }
  }
  if (reference_multiplier < 1) {
    throw ParameterError("reference_multiplier must be >= 1");
  }
}

Eigen::MatrixXd ExperimentConfig::resolved_form_covariance() const {
  if (form_covariance.size() != 0) return form_covariance;
  Eigen::MatrixXd C(form_dim, form_dim);
  for (int i = 0; i < form_dim; ++i) {
    for (int j = 0; j < form_dim; ++j) {
      C(i, j) = sigma * sigma * std::pow(0.5, std::abs(i - j));
    }
  }
  return C;
}

double ExperimentConfig::resolved_delta() const {
  if (delta >= 0.0) return delta;
  return default_outlier_delta(spikes, sigma);
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j,
             {"experiment", "N", "replications", "sigma", "law", "field",
              "spikes", "seed", "delta", "real_diag_convention", "limit_law",
              "allow_large_k", "out", "eigen_tolerance", "target_spike",
              "form_dim", "form_covariance", "reference_multiplier"},
             "config");
  ExperimentConfig cfg;
  for (const char* req : {"experiment", "N", "replications", "seed", "spikes"}) {
    if (!j.contains(req)) {
      throw ParameterError(std::string("config needs '") + req + "'");
    }
  }
  cfg.experiment = experiment_from_name(j.at("experiment").get<std::string>());
  cfg.N = j.at("N").get<int>();
  cfg.replications = j.at("replications").get<int>();
  cfg.sigma = j.value("sigma", 1.0);
  cfg.law = j.value("law", std::string("gaussian"));
  const std::string field = j.value("field", std::string("real"));
  if (field == "real") {
    cfg.field = EnsembleField::RealSymmetric;
  } else if (field == "complex") {
    cfg.field = EnsembleField::ComplexHermitian;
  } else {
    throw ParameterError("field must be 'real' or 'complex'");
  }
  if (!j.at("spikes").is_array()) {
    throw ParameterError("'spikes' must be an array");
  }
  for (const json& sj : j.at("spikes")) {
    cfg.spikes.spikes.push_back(spike_from_json(sj));
  }
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.delta = j.value("delta", -1.0);
  const std::string conv =
      j.value("real_diag_convention", std::string("theorem_two_one"));
  if (conv == "theorem_one") {
    cfg.real_diag_convention = RealDiagConvention::TheoremOne;
  } else if (conv == "theorem_two_one") {
    cfg.real_diag_convention = RealDiagConvention::TheoremTwoOne;
  } else {
    throw ParameterError(
        "real_diag_convention must be theorem_one or theorem_two_one");
  }
  cfg.limit_law = j.value("limit_law", std::string("auto"));
  cfg.allow_large_k = j.value("allow_large_k", false);
  cfg.out = j.value("out", std::string());
  cfg.eigen_tolerance = j.value("eigen_tolerance", 0.15);
  cfg.target_spike = j.value("target_spike", 0);
  cfg.form_dim = j.value("form_dim", 1);
  if (j.contains("form_covariance")) {
    const json& rows = j.at("form_covariance");
    const std::size_t K = rows.size();
    Eigen::MatrixXd C(K, K);
    for (std::size_t a = 0; a < K; ++a) {
      if (rows[a].size() != K) {
        throw ParameterError("form_covariance must be square");
      }
      for (std::size_t b = 0; b < K; ++b) C(a, b) = rows[a][b].get<double>();
    }
    cfg.form_covariance = std::move(C);
    if (!j.contains("form_dim")) cfg.form_dim = static_cast<int>(K);
  }
  cfg.reference_multiplier = j.value("reference_multiplier", 10);
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = experiment_name(cfg.experiment);
  j["N"] = cfg.N;
  j["replications"] = cfg.replications;
  j["sigma"] = cfg.sigma;
  j["law"] = cfg.law;
  j["field"] = field_name(cfg.field);
  json spikes = json::array();
  for (const Spike& s : cfg.spikes.spikes) spikes.push_back(spike_to_json(s));
  j["spikes"] = std::move(spikes);
  j["seed"] = cfg.seed;
  if (cfg.delta >= 0.0) j["delta"] = cfg.delta;
  j["real_diag_convention"] =
      cfg.real_diag_convention == RealDiagConvention::TheoremOne
          ? "theorem_one"
          : "theorem_two_one";
  j["limit_law"] = cfg.limit_law;
  j["allow_large_k"] = cfg.allow_large_k;
  if (!cfg.out.empty()) j["out"] = cfg.out;
  j["eigen_tolerance"] = cfg.eigen_tolerance;
  j["target_spike"] = cfg.target_spike;
  j["form_dim"] = cfg.form_dim;
  if (cfg.form_covariance.size() != 0) {
    json rows = json::array();
    for (Eigen::Index a = 0; a < cfg.form_covariance.rows(); ++a) {
      json row = json::array();
      for (Eigen::Index b = 0; b < cfg.form_covariance.cols(); ++b) {
        row.push_back(cfg.form_covariance(a, b));
      }
      rows.push_back(std::move(row));
    }
    j["form_covariance"] = std::move(rows);
  }
  j["reference_multiplier"] = cfg.reference_multiplier;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParameterError("config parse error in '" + path + "': " + e.what());
  }
  ExperimentConfig cfg = config_from_json(j);
  if (const char* env = std::getenv("RMTLAB_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      throw ParameterError("RMTLAB_SEED must be an unsigned integer");
    }
    cfg.seed = static_cast<std::uint64_t>(v);
  }
  return cfg;
}

}  // namespace rmtlab
