#include "rmtlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>

#include "rmtlab/errors.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/theory.hpp"

#ifndef RMTLAB_VERSION
#define RMTLAB_VERSION "unversioned"
#endif

namespace rmtlab {

namespace {

using nlohmann::json;

// Replications draw from stream ids 0..reps-1; reference draws from a
// disjoint id range so adding replications never perturbs the reference.
constexpr std::uint64_t kReferenceStreamBase = 1ull << 62;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string rank_name(int spike, int rank) {
  return "spike" + std::to_string(spike) + "_rank" + std::to_string(rank);
}

std::string gap_name(int spike, int rank) {
  return "spike" + std::to_string(spike) + "_gap" + std::to_string(rank) +
         std::to_string(rank + 1);
}

json moments_to_json(const Moments& m) {
  return json{{"n", m.n},
              {"mean", m.mean},
              {"variance", m.variance},
              {"skewness", m.skewness},
              {"excess_kurtosis", m.excess_kurtosis}};
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

// Deformed minor of the split model: W_minor / sqrt(N) plus the subcritical
// deformation blocks (the ambient 1/sqrt(N), not the minor's own dimension).
HermitianMatrix deformed_minor(const HermitianMatrix& w_minor, double root_n,
                               const HermitianMatrix* a_minor) {
  if (w_minor.is_real()) {
    Eigen::MatrixXd m = w_minor.real() / root_n;
    if (a_minor) m += a_minor->real();
    return hermitian_unchecked(std::move(m));
  }
  Eigen::MatrixXcd m = w_minor.complex() / root_n;
  if (a_minor) m += a_minor->complex();
  return hermitian_unchecked(std::move(m));
}

// Subcritical tail of the spike spec (deformation of the minor), or an
// empty optional when there is none.
std::optional<HermitianMatrix> subcritical_minor_deformation(
    const ExperimentConfig& cfg, Eigen::Index minor_dim) {
  SpikeSpec tail;
  for (const Spike& s : cfg.spikes.spikes) {
    if (!(s.theta > cfg.sigma)) tail.spikes.push_back(s);
  }
  if (tail.spikes.empty()) return std::nullopt;
  return build_spike_frame(tail, minor_dim, cfg.field).deformation;
}

void append_rank_ks(ExperimentResult& out, const std::string& name,
                    const std::string& ref_desc, std::vector<double> sim,
                    std::vector<double> ref) {
  out.moments[name] = sample_moments(sim);
  out.moments[name + ":reference"] = sample_moments(ref);
  NamedKS nk;
  nk.name = name;
  nk.reference = ref_desc;
  nk.report = ks_two_sample(sim, ref);
  out.ks.push_back(std::move(nk));
  out.reference[name] = std::move(ref);
}

// ---------------------------------------------------------------------------
// FluctuationVsLimit / AsConvergence share the replication loop.

struct FluctuationData {
  std::vector<FluctuationRecord> records;
  std::vector<OutlierCount> counts;
  long replications = 0;
};

FluctuationData simulate_fluctuations(const ExperimentConfig& cfg, int workers,
                                      bool with_counts, double delta) {
  const EntryLaw law = cfg.entry_law();
  const SpikeModel model = build_spike_frame(cfg.spikes, cfg.N, cfg.field);
  FluctuationData data;
  data.replications = cfg.replications;
  data.records.resize(static_cast<std::size_t>(cfg.replications));
  if (with_counts) {
    data.counts.resize(static_cast<std::size_t>(cfg.replications));
  }
  parallel_for(cfg.replications, workers, [&](long r) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(r));
    const HermitianMatrix W = sample_wigner(cfg.N, cfg.field, law, rng);
    const HermitianMatrix M = assemble_deformed(W, model.deformation);
    const SpectralSample sample = eigenvalues_sorted(M);
    data.records[static_cast<std::size_t>(r)] =
        rescale_fluctuations(sample, cfg.spikes, cfg.sigma, cfg.N, r);
    if (with_counts) {
      data.counts[static_cast<std::size_t>(r)] =
          count_outliers(sample, cfg.sigma, delta);
    }
  });
  return data;
}

void fill_rows(ExperimentResult& out, const FluctuationData& data) {
  for (const FluctuationRecord& rec : data.records) {
    for (const SpikeFluctuation& f : rec.spikes) {
      for (Eigen::Index i = 0; i < f.xi.size(); ++i) {
        out.rows.push_back(EigRow{rec.replication, f.spike_index,
                                  static_cast<int>(i) + 1, f.lambda[i],
                                  f.xi[i]});
      }
    }
  }
}

ExperimentResult run_fluctuation(const ExperimentConfig& cfg, int workers) {
  ExperimentResult out;
  const FluctuationData data =
      simulate_fluctuations(cfg, workers, /*with_counts=*/false, 0.0);
  fill_rows(out, data);

  json laws = json::object();
  const int sc = cfg.spikes.supercritical_count(cfg.sigma);
  for (int j = 0; j < sc; ++j) {
    const Spike& s = cfg.spikes.spikes[static_cast<std::size_t>(j)];
    const int kj = s.multiplicity;
    const LimitLaw limit = select_limit_law(cfg, j);
    laws["spike" + std::to_string(j)] = limit.describe();

    // Pool simulated xi per rank.
    std::vector<std::vector<double>> sim(static_cast<std::size_t>(kj));
    std::vector<std::vector<double>> sim_gap(
        static_cast<std::size_t>(kj > 1 ? kj - 1 : 0));
    for (const FluctuationRecord& rec : data.records) {
      const SpikeFluctuation& f = rec.spikes[static_cast<std::size_t>(j)];
      for (int i = 0; i < kj; ++i) {
        sim[static_cast<std::size_t>(i)].push_back(f.xi[i]);
      }
      for (int i = 0; i + 1 < kj; ++i) {
        sim_gap[static_cast<std::size_t>(i)].push_back(f.xi[i] - f.xi[i + 1]);
      }
    }

    // Reference draws from the limit law, on reserved stream ids.
    const long nref =
        static_cast<long>(cfg.replications) * cfg.reference_multiplier;
    std::vector<Eigen::VectorXd> ref(static_cast<std::size_t>(nref));
    const std::uint64_t base =
        kReferenceStreamBase + static_cast<std::uint64_t>(j) *
                                   static_cast<std::uint64_t>(nref);
    parallel_for(nref, workers, [&](long d) {
      RngStream rng(cfg.seed, base + static_cast<std::uint64_t>(d));
      ref[static_cast<std::size_t>(d)] = sample_limit_eigs(limit, rng);
    });

    for (int i = 0; i < kj; ++i) {
      std::vector<double> ref_rank;
      ref_rank.reserve(static_cast<std::size_t>(nref));
      for (const auto& v : ref) ref_rank.push_back(v[i]);
      append_rank_ks(out, rank_name(j, i + 1), limit.describe(),
                     sim[static_cast<std::size_t>(i)], std::move(ref_rank));
    }
    for (int i = 0; i + 1 < kj; ++i) {
      std::vector<double> ref_gap;
      ref_gap.reserve(static_cast<std::size_t>(nref));
      for (const auto& v : ref) ref_gap.push_back(v[i] - v[i + 1]);
      append_rank_ks(out, gap_name(j, i + 1), limit.describe(),
                     sim_gap[static_cast<std::size_t>(i)], std::move(ref_gap));
    }
  }
  out.details["limit_laws"] = std::move(laws);
  return out;
}

ExperimentResult run_as_convergence(const ExperimentConfig& cfg, int workers) {
  ExperimentResult out;
  const double delta = cfg.resolved_delta();
  const FluctuationData data =
      simulate_fluctuations(cfg, workers, /*with_counts=*/true, delta);
  fill_rows(out, data);

  const int expected_upper = cfg.spikes.k_plus_sigma(cfg.sigma);
  int expected_lower = 0;
  for (const Spike& s : cfg.spikes.spikes) {
    if (s.theta < -cfg.sigma) expected_lower += s.multiplicity;
  }

  long match = 0;
  double mean_count = 0.0;
  for (const OutlierCount& c : data.counts) {
    if (c.upper == expected_upper && c.lower == expected_lower) ++match;
    mean_count += c.upper;
  }
  mean_count /= static_cast<double>(data.counts.size());

  // Frequency of |lambda - rho_j| < tolerance per rank.
  json rank_freq = json::object();
  const int sc = cfg.spikes.supercritical_count(cfg.sigma);
  for (int j = 0; j < sc; ++j) {
    const Spike& s = cfg.spikes.spikes[static_cast<std::size_t>(j)];
    const double rho = rho_theta(s.theta, cfg.sigma);
    for (int i = 0; i < s.multiplicity; ++i) {
      long inside = 0;
      for (const FluctuationRecord& rec : data.records) {
        const double lam =
            rec.spikes[static_cast<std::size_t>(j)].lambda[i];
        if (std::abs(lam - rho) < cfg.eigen_tolerance) ++inside;
      }
      rank_freq[rank_name(j, i + 1)] =
          static_cast<double>(inside) / static_cast<double>(cfg.replications);
    }
  }

  out.details["delta"] = delta;
  out.details["eigen_tolerance"] = cfg.eigen_tolerance;
  out.details["expected_outliers_upper"] = expected_upper;
  out.details["expected_outliers_lower"] = expected_lower;
  out.details["count_match_frequency"] =
      static_cast<double>(match) / static_cast<double>(cfg.replications);
  out.details["mean_upper_count"] = mean_count;
  out.details["rank_containment_frequency"] = std::move(rank_freq);
  return out;
}

// ---------------------------------------------------------------------------

ExperimentResult run_resolvent(const ExperimentConfig& cfg, int workers) {
  ExperimentResult out;
  const EntryLaw law = cfg.entry_law();
  const Spike& target =
      cfg.spikes.spikes[static_cast<std::size_t>(cfg.target_spike)];
  const double rho = rho_theta(target.theta, cfg.sigma);
  const int k = cfg.spikes.frame_total(cfg.sigma);
  const Eigen::Index n_minor = cfg.N - k;
  const double root_n = std::sqrt(static_cast<double>(cfg.N));
  const std::optional<HermitianMatrix> a_minor =
      subcritical_minor_deformation(cfg, n_minor);

  struct Slot {
    ResolventTraces traces;
    bool pole = false;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, workers, [&](long r) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(r));
    const HermitianMatrix W = sample_wigner(cfg.N, cfg.field, law, rng);
    const BlockSplit blocks = split_blocks(W, k);
    const HermitianMatrix M =
        deformed_minor(blocks.minor, root_n, a_minor ? &*a_minor : nullptr);
    try {
      slots[static_cast<std::size_t>(r)].traces = resolvent_traces(M, rho);
    } catch (const PoleError&) {
      slots[static_cast<std::size_t>(r)].pole = true;
    }
  });

  const ResolventLimitValues lim = resolvent_limits(target.theta, cfg.sigma);
  std::vector<double> tr1, tr2, diag2, scaled;
  json per_rep = json::array();
  for (std::size_t r = 0; r < slots.size(); ++r) {
    if (slots[r].pole) {
      ++out.discards;
      continue;
    }
    const ResolventTraces& t = slots[r].traces;
    tr1.push_back(t.tr1);
    tr2.push_back(t.tr2);
    diag2.push_back(t.diag2);
    scaled.push_back(root_n * (t.tr1 - lim.stieltjes1));
    per_rep.push_back({static_cast<long>(r), t.tr1, t.tr2, t.diag2});
  }
  if (tr1.empty()) throw NumericError("all replications hit the pole");

  out.moments["tr1"] = sample_moments(tr1);
  out.moments["tr2"] = sample_moments(tr2);
  out.moments["diag2"] = sample_moments(diag2);
  out.moments["scaled_tr1_deviation"] = sample_moments(scaled);

  double abs_scaled = 0.0;
  for (double v : scaled) abs_scaled += std::abs(v);
  abs_scaled /= static_cast<double>(scaled.size());

  out.details["rho"] = rho;
  out.details["theory"] = {{"tr1", lim.stieltjes1},
                           {"tr2", lim.stieltjes2},
                           {"diag2", lim.diag2_limit}};
  out.details["mean_scaled_tr1_deviation"] =
      sample_moments(scaled).mean;
  out.details["mean_abs_scaled_tr1_deviation"] = abs_scaled;
  out.details["per_replication"] = std::move(per_rep);
  return out;
}

// ---------------------------------------------------------------------------

ExperimentResult run_sesquilinear(const ExperimentConfig& cfg, int workers) {
  ExperimentResult out;
  const EntryLaw law = cfg.entry_law();
  const Spike& target =
      cfg.spikes.spikes[static_cast<std::size_t>(cfg.target_spike)];
  const double theta = target.theta;
  const double sigma = cfg.sigma;
  const double rho = rho_theta(theta, sigma);
  const int k = cfg.spikes.frame_total(sigma);
  const Eigen::Index n_minor = cfg.N - k;
  const double root_n = std::sqrt(static_cast<double>(cfg.N));
  const int K = cfg.form_dim;
  const Eigen::MatrixXd C = cfg.resolved_form_covariance();
  Eigen::LLT<Eigen::MatrixXd> cholC(C);
  if (cholC.info() != Eigen::Success) {
    throw ParameterError("form_covariance must be positive definite");
  }
  const Eigen::MatrixXd Lt = Eigen::MatrixXd(cholC.matrixL()).transpose();
  const std::optional<HermitianMatrix> a_minor =
      subcritical_minor_deformation(cfg, n_minor);

  struct Slot {
    Eigen::VectorXd s;
    bool pole = false;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, workers, [&](long r) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(r));
    const HermitianMatrix W = sample_wigner(cfg.N, cfg.field, law, rng);
    const BlockSplit blocks = split_blocks(W, k);
    const HermitianMatrix M =
        deformed_minor(blocks.minor, root_n, a_minor ? &*a_minor : nullptr);

    const Eigen::VectorXd eigs = eigenvalues_sorted(M).values;
    if (!(rho > eigs[0]) ||
        rho - eigs[0] < 1e-10 * std::max(1.0, std::abs(rho))) {
      slots[static_cast<std::size_t>(r)].pole = true;
      return;
    }
    const double trG = (1.0 / (rho - eigs.array())).sum();

    Eigen::MatrixXd S = -M.real();
    S.diagonal().array() += rho;
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
      slots[static_cast<std::size_t>(r)].pole = true;
      return;
    }

    // Rows x_i ~ N(0, C), drawn after the matrix from the same stream.
    Eigen::MatrixXd X(n_minor, K);
    for (Eigen::Index i = 0; i < n_minor; ++i) {
      for (int l = 0; l < K; ++l) X(i, l) = rng.next_gaussian();
    }
    X = X * Lt;
    const Eigen::MatrixXd Z = llt.solve(X);
    Eigen::VectorXd s(K);
    for (int l = 0; l < K; ++l) {
      s[l] = (X.col(l).dot(Z.col(l)) - C(l, l) * trG) / root_n;
    }
    slots[static_cast<std::size_t>(r)].s = std::move(s);
  });

  std::vector<Eigen::VectorXd> samples;
  samples.reserve(slots.size());
  for (const Slot& slot : slots) {
    if (slot.pole) {
      ++out.discards;
    } else {
      samples.push_back(slot.s);
    }
  }
  if (samples.size() < 2) throw NumericError("too few surviving replications");

  const Eigen::MatrixXd emp = empirical_covariance(samples);

  // Limit covariance from the entry cross-moments of the Gaussian x = y
  // design: E[x_l y_l' ] = C, E[x_l y_l x_l' y_l'] = C_ll C_l'l' + 2 C_ll'^2.
  const ResolventLimitValues lim = resolvent_limits(theta, sigma);
  SesquilinearMoments mom;
  mom.omega = lim.diag2_limit;
  mom.tr2n = lim.stieltjes2;
  mom.tr2tn = lim.stieltjes2;  // real symmetric: A A^T = A^2
  mom.rho = C.diagonal();
  mom.xy = C;
  mom.xx = C;
  mom.yy = C;
  mom.xyxy.resize(K, K);
  for (int l = 0; l < K; ++l) {
    for (int m = 0; m < K; ++m) {
      mom.xyxy(l, m) = C(l, l) * C(m, m) + 2.0 * C(l, m) * C(l, m);
    }
  }
  const SesquilinearCovariance theory = sesquilinear_covariance(mom);

  const double fro_rel =
      (emp - theory.B).norm() / std::max(theory.B.norm(), 1e-300);

  for (int l = 0; l < K; ++l) {
    std::vector<double> comp;
    comp.reserve(samples.size());
    for (const auto& s : samples) comp.push_back(s[l]);
    out.moments["form" + std::to_string(l + 1)] = sample_moments(comp);
  }
  out.details["form_covariance"] = matrix_to_json(C);
  out.details["empirical_B"] = matrix_to_json(emp);
  out.details["theory_B"] = matrix_to_json(theory.B);
  out.details["theory_B1"] = matrix_to_json(theory.B1);
  out.details["theory_B2"] = matrix_to_json(theory.B2);
  out.details["theory_B3"] = matrix_to_json(theory.B3);
  out.details["omega"] = theory.omega;
  out.details["tr2n"] = theory.tr2n;
  out.details["tr2tn"] = theory.tr2tn;
  out.details["frobenius_rel_error"] = fro_rel;
  out.details["scalar_rel_error"] =
      std::abs(emp(0, 0) - theory.B(0, 0)) / theory.B(0, 0);
  return out;
}

// ---------------------------------------------------------------------------

ExperimentResult run_empirical_v(const ExperimentConfig& cfg, int workers) {
  ExperimentResult out;
  const EntryLaw law = cfg.entry_law();
  const Spike& target =
      cfg.spikes.spikes[static_cast<std::size_t>(cfg.target_spike)];
  const int kj = target.multiplicity;
  const int t = field_t(cfg.field);
  const bool case_b = target.geometry == SpikeGeometry::SpreadUniform;

  struct Slot {
    Eigen::MatrixXcd V;
    Eigen::VectorXd eigs;
    bool pole = false;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, workers, [&](long r) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(r));
    EmpiricalVDraw draw = empirical_V_finite_N(cfg.spikes, law, cfg.field,
                                               cfg.N, cfg.target_spike, rng);
    Slot& slot = slots[static_cast<std::size_t>(r)];
    if (draw.pole) {
      slot.pole = true;
      return;
    }
    slot.eigs = eigenvalues_sorted(draw.V).values;
    slot.V = draw.V.to_complex();
  });

  std::vector<const Slot*> kept;
  for (std::size_t r = 0; r < slots.size(); ++r) {
    if (slots[r].pole) {
      ++out.discards;
      continue;
    }
    kept.push_back(&slots[r]);
    for (int i = 0; i < kj; ++i) {
      out.rows.push_back(EigRow{static_cast<long>(r), cfg.target_spike, i + 1,
                                kNaN, slots[r].eigs[i]});
    }
  }
  if (kept.size() < 2) throw NumericError("too few surviving draws");

  // Entrywise variances E|V_pq - mean|^2 of the surviving draws.
  Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(kj, kj);
  for (const Slot* s : kept) mean += s->V;
  mean /= static_cast<double>(kept.size());
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(kj, kj);
  for (const Slot* s : kept) {
    var += (s->V - mean).cwiseAbs2();
  }
  var /= static_cast<double>(kept.size() - 1);

  // Target profile: the entry variances of the limit law.
  const SpikeModel tm = build_spike_frame(
      [&] {
        SpikeSpec one;
        one.spikes.push_back(target);
        return one;
      }(),
      target.frame_dim(), cfg.field);
  const Eigen::MatrixXcd U = tm.frame.blocks.front().columns;
  Eigen::MatrixXd target_var(kj, kj);
  std::string case_label;
  if (case_b) {
    const double tau = guoe_tau(target.theta, cfg.sigma);
    for (int p = 0; p < kj; ++p) {
      for (int q = 0; q < kj; ++q) {
        target_var(p, q) = (p == q) ? 0.5 * t * tau : tau;
      }
    }
    case_label = "delocalized (gaussian ensemble limit)";
  } else {
    target_var = limit_v_entry_variances(U, law, target.theta, cfg.field);
    case_label = "frame limit";
  }
  const double max_rel =
      ((var - target_var).cwiseAbs().array() / target_var.array())
          .maxCoeff();

  // Eigenvalue law against freshly drawn limit samples.
  const long nref =
      static_cast<long>(cfg.replications) * cfg.reference_multiplier;
  LimitLaw limit;
  if (case_b) {
    limit.kind = LimitLaw::Kind::GuoeEigenvalues;
    limit.kdim = kj;
    limit.tau = guoe_tau(target.theta, cfg.sigma);
    limit.field = cfg.field;
  } else {
    limit.kind = LimitLaw::Kind::FrameVEigenvalues;
    limit.frame = U;
    limit.law = law;
    limit.theta = target.theta;
    limit.field = cfg.field;
  }
  std::vector<Eigen::VectorXd> ref(static_cast<std::size_t>(nref));
  parallel_for(nref, workers, [&](long d) {
    RngStream rng(cfg.seed, kReferenceStreamBase + static_cast<std::uint64_t>(d));
    ref[static_cast<std::size_t>(d)] = sample_limit_eigs(limit, rng);
  });
  for (int i = 0; i < kj; ++i) {
    std::vector<double> sim_rank, ref_rank;
    sim_rank.reserve(kept.size());
    for (const Slot* s : kept) sim_rank.push_back(s->eigs[i]);
    ref_rank.reserve(static_cast<std::size_t>(nref));
    for (const auto& v : ref) ref_rank.push_back(v[i]);
    append_rank_ks(out, rank_name(cfg.target_spike, i + 1), limit.describe(),
                   std::move(sim_rank), std::move(ref_rank));
  }

  out.details["case"] = case_label;
  out.details["entry_variances"] = matrix_to_json(var);
  out.details["target_entry_variances"] = matrix_to_json(target_var);
  out.details["max_entry_variance_rel_error"] = max_rel;
  out.details["pole_rate"] = static_cast<double>(out.discards) /
                             static_cast<double>(cfg.replications);
  return out;
}

}  // namespace

LimitLaw select_limit_law(const ExperimentConfig& cfg, int spike_index) {
  const Spike& s = cfg.spikes.spikes[static_cast<std::size_t>(spike_index)];
  if (!(s.theta > cfg.sigma)) {
    throw ParameterError("limit law requested for a subcritical spike");
  }
  const EntryLaw law = cfg.entry_law();
  const int t = field_t(cfg.field);

  std::string mode = cfg.limit_law;
  if (mode == "auto") {
    switch (s.geometry) {
      case SpikeGeometry::Canonical:
        mode = (s.multiplicity == 1) ? "convolution" : "frame_v";
        break;
      case SpikeGeometry::SpreadUniform:
        mode = "guoe";
        break;
      case SpikeGeometry::ExplicitFrame:
        mode = "frame_v";
        break;
    }
  }

  LimitLaw out;
  out.law = law;
  out.field = cfg.field;
  out.theta = s.theta;
  if (mode == "convolution") {
    if (s.multiplicity != 1 || s.geometry != SpikeGeometry::Canonical) {
      throw ParameterError(
          "convolution limit applies to canonical rank-one spikes only");
    }
    out.kind = LimitLaw::Kind::ConvolutionMuGauss;
    out.gauss_variance = v_theta(s.theta, cfg.sigma, law.m4, t);
    out.mu_scale = mu_diag_scale(cfg.real_diag_convention, cfg.field);
    return out;
  }
  if (mode == "guoe") {
    out.kind = LimitLaw::Kind::GuoeEigenvalues;
    out.kdim = s.multiplicity;
    out.tau = guoe_tau(s.theta, cfg.sigma);
    return out;
  }
  // frame_v
  out.kind = LimitLaw::Kind::FrameVEigenvalues;
  SpikeSpec one;
  one.spikes.push_back(s);
  const SpikeModel tm = build_spike_frame(one, s.frame_dim(), cfg.field);
  out.frame = tm.frame.blocks.front().columns;
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  if (workers <= 0) workers = default_workers();
  Timer timer;
  ExperimentResult out;
  switch (cfg.experiment) {
    case ExperimentKind::FluctuationVsLimit:
      out = run_fluctuation(cfg, workers);
      break;
    case ExperimentKind::AsConvergence:
      out = run_as_convergence(cfg, workers);
      break;
    case ExperimentKind::ResolventLimits:
      out = run_resolvent(cfg, workers);
      break;
    case ExperimentKind::SesquilinearCLT:
      out = run_sesquilinear(cfg, workers);
      break;
    case ExperimentKind::EmpiricalVConvergence:
      out = run_empirical_v(cfg, workers);
      break;
  }
  if (out.discards * 20 > cfg.replications) {
    throw NumericError("discard rate above 5% (" +
                       std::to_string(out.discards) + " of " +
                       std::to_string(cfg.replications) +
                       " replications hit the resolvent pole)");
  }
  out.config = cfg;
  out.version = RMTLAB_VERSION;
  out.experiment_id = std::string(experiment_name(cfg.experiment)) + "-N" +
                      std::to_string(cfg.N) + "-s" + std::to_string(cfg.seed);
  out.wall_seconds = timer.seconds();
  return out;
}

json ExperimentResult::to_json() const {
  json j;
  j["version"] = version;
  j["experiment_id"] = experiment_id;
  j["config"] = config_to_json(config);
  j["wall_seconds"] = wall_seconds;
  j["discards"] = discards;
  json rows_json = json::array();
  for (const EigRow& r : rows) {
    rows_json.push_back({r.replication, r.spike_index, r.eig_rank,
                         std::isnan(r.lambda) ? json() : json(r.lambda),
                         r.xi});
  }
  j["rows"] = std::move(rows_json);
  json ref = json::object();
  for (const auto& [name, values] : reference) ref[name] = values;
  j["reference"] = std::move(ref);
  json ksj = json::array();
  for (const NamedKS& nk : ks) {
    ksj.push_back({{"name", nk.name},
                   {"reference", nk.reference},
                   {"d", nk.report.d},
                   {"n", nk.report.n},
                   {"m", nk.report.m},
                   {"p_value", nk.report.p_value}});
  }
  j["ks"] = std::move(ksj);
  json mom = json::object();
  for (const auto& [name, m] : moments) mom[name] = moments_to_json(m);
  j["moments"] = std::move(mom);
  j["details"] = details;
  return j;
}

namespace {

std::string csv_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string strip_json_suffix(const std::string& path) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    return path.substr(0, path.size() - 5);
  }
  return path;
}

}  // namespace

void write_flat_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParameterError("cannot write '" + path + "'");
  f << "experiment_id,replication,spike_index,eig_rank,lambda,xi\n";
  for (const EigRow& r : result.rows) {
    f << result.experiment_id << ',' << r.replication << ',' << r.spike_index
      << ',' << r.eig_rank << ',' << csv_double(r.lambda) << ','
      << csv_double(r.xi) << '\n';
  }
}

void write_reference_csv(const ExperimentResult& result,
                         const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParameterError("cannot write '" + path + "'");
  f << "sample_id,value\n";
  for (const auto& [name, values] : result.reference) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      f << name << '_' << i << ',' << csv_double(values[i]) << '\n';
    }
  }
}

void write_result(const ExperimentResult& result, const std::string& path) {
  {
    std::ofstream f(path);
    if (!f) throw ParameterError("cannot write '" + path + "'");
    f << result.to_json().dump(2) << '\n';
  }
  const std::string stem = strip_json_suffix(path);
  write_flat_csv(result, stem + ".csv");
  write_reference_csv(result, stem + "_reference.csv");
}

}  // namespace rmtlab
