#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmtlab/config.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/experiment.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/stats.hpp"
#include "rmtlab/theory.hpp"

#ifndef RMTLAB_VERSION
#define RMTLAB_VERSION "unversioned"
#endif

namespace {

using rmtlab::EnsembleField;

EnsembleField parse_field(const std::string& s) {
  if (s == "real") return EnsembleField::RealSymmetric;
  if (s == "complex") return EnsembleField::ComplexHermitian;
  throw rmtlab::ParameterError("field must be 'real' or 'complex'");
}

int cmd_theory(double theta, double sigma, const std::string& law_name,
               const std::string& field_name) {
  const EnsembleField field = parse_field(field_name);
  const rmtlab::EntryLaw law = rmtlab::entry_law_from_name(law_name, sigma);
  const rmtlab::TheoryValues tv = rmtlab::theory_values(
      theta, sigma, law.m4, rmtlab::field_t(field));
  nlohmann::json j{{"theta", tv.theta},
                   {"sigma", tv.sigma},
                   {"law", law.name},
                   {"m4", tv.m4},
                   {"field", field_name},
                   {"t", tv.t},
                   {"rho", tv.rho},
                   {"c", tv.c},
                   {"v", tv.v},
                   {"tau_guoe", tv.tau_guoe},
                   {"h_vpp", tv.h_vpp},
                   {"h_vpl", tv.h_vpl},
                   {"stieltjes1", tv.stieltjes1},
                   {"stieltjes2", tv.stieltjes2},
                   {"diag2_limit", tv.diag2_limit}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

// One column of numbers; a header row and extra columns are skipped, the
// last comma-separated field of each row is parsed.
std::vector<double> read_value_column(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw rmtlab::ParameterError("cannot read '" + path + "'");
  std::vector<double> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto pos = line.find_last_of(',');
    const std::string tail = pos == std::string::npos ? line
                                                      : line.substr(pos + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(tail, &used);
      if (used == tail.size()) out.push_back(v);
    } catch (const std::exception&) {
      // header or non-numeric row
    }
  }
  if (out.empty()) {
    throw rmtlab::ParameterError("no numeric values in '" + path + "'");
  }
  return out;
}

int cmd_ks(const std::string& a_path, const std::string& b_path) {
  const rmtlab::KSReport r =
      rmtlab::ks_two_sample(read_value_column(a_path), read_value_column(b_path));
  nlohmann::json j{{"d", r.d}, {"n", r.n}, {"m", r.m}, {"p_value", r.p_value}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

struct RunFlags {
  std::string config_path;
  std::string out;
  std::string seed_text;
  int workers = 0;
};

rmtlab::ExperimentConfig load_with_overrides(const RunFlags& flags) {
  rmtlab::ExperimentConfig cfg = rmtlab::load_config(flags.config_path);
  if (!flags.seed_text.empty()) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(flags.seed_text, &used);
      if (used != flags.seed_text.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw rmtlab::ParameterError("--seed must be an unsigned integer");
    }
  }
  if (!flags.out.empty()) cfg.out = flags.out;
  return cfg;
}

int cmd_experiment(const RunFlags& flags) {
  const rmtlab::ExperimentConfig cfg = load_with_overrides(flags);
  const rmtlab::ExperimentResult result =
      rmtlab::run_experiment(cfg, flags.workers);
  const std::string out = cfg.out.empty()
                              ? result.experiment_id + ".json"
                              : cfg.out;
  rmtlab::write_result(result, out);
  std::fprintf(stderr, "wrote %s (%.1fs, %ld discards)\n", out.c_str(),
               result.wall_seconds, result.discards);
  for (const rmtlab::NamedKS& nk : result.ks) {
    std::fprintf(stderr, "  ks %-24s d=%.4f p=%.4g vs %s\n", nk.name.c_str(),
                 nk.report.d, nk.report.p_value, nk.reference.c_str());
  }
  return 0;
}

// Simulation side only: the flat eigenvalue CSV, no reference draws.
int cmd_sample(const RunFlags& flags) {
  rmtlab::ExperimentConfig cfg = load_with_overrides(flags);
  cfg.reference_multiplier = 1;  // reference is discarded below
  const rmtlab::ExperimentResult result =
      rmtlab::run_experiment(cfg, flags.workers);
  const std::string out = cfg.out.empty()
                              ? result.experiment_id + ".csv"
                              : cfg.out;
  rmtlab::write_flat_csv(result, out);
  std::fprintf(stderr, "wrote %s (%zu rows, %ld discards)\n", out.c_str(),
               result.rows.size(), result.discards);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  rmtlab::pin_blas_single_threaded();
  CLI::App app{"Spiked Wigner simulation lab"};
  app.set_version_flag("--version", RMTLAB_VERSION);
  app.require_subcommand(1);

  double theta = 2.0, sigma = 1.0;
  std::string law = "gaussian", field = "real";
  CLI::App* theory = app.add_subcommand(
      "theory", "Closed-form values for one (theta, sigma, law, field)");
  theory->add_option("--theta", theta, "Spike strength")->required();
  theory->add_option("--sigma", sigma, "Entry standard deviation");
  theory->add_option("--law", law,
                     "Entry law: gaussian|rademacher|uniform|twopoint");
  theory->add_option("--field", field, "real|complex");

  RunFlags run_flags;
  CLI::App* experiment = app.add_subcommand(
      "experiment", "Run a configured experiment; writes JSON + CSV");
  experiment->add_option("--config", run_flags.config_path, "Config JSON path")
      ->required();
  experiment->add_option("--seed", run_flags.seed_text,
                         "Override config and RMTLAB_SEED");
  experiment->add_option("--workers", run_flags.workers,
                         "Worker threads (default: hardware)");
  experiment->add_option("--out", run_flags.out, "Output JSON path");

  RunFlags sample_flags;
  CLI::App* sample = app.add_subcommand(
      "sample", "Run the simulation side only; writes the flat CSV");
  sample->add_option("--config", sample_flags.config_path, "Config JSON path")
      ->required();
  sample->add_option("--seed", sample_flags.seed_text,
                     "Override config and RMTLAB_SEED");
  sample->add_option("--workers", sample_flags.workers,
                     "Worker threads (default: hardware)");
  sample->add_option("--out", sample_flags.out, "Output CSV path");

  std::string ks_a, ks_b;
  CLI::App* ks = app.add_subcommand(
      "ks", "Two-sample KS between the value columns of two CSV files");
  ks->add_option("a", ks_a, "First CSV")->required();
  ks->add_option("b", ks_b, "Second CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (theory->parsed()) return cmd_theory(theta, sigma, law, field);
    if (experiment->parsed()) return cmd_experiment(run_flags);
    if (sample->parsed()) return cmd_sample(sample_flags);
    if (ks->parsed()) return cmd_ks(ks_a, ks_b);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
