#pragma once

#include <string>
#include <string_view>

#include "rmtlab/rng.hpp"

namespace rmtlab {

enum class LawKind { Gaussian, Rademacher, UniformSymmetric, TwoPointMix };

// Symmetric entry distribution with variance sigma^2 and known fourth moment.
// All laws here are symmetric about 0, so every odd moment vanishes.
struct EntryLaw {
  LawKind kind = LawKind::Gaussian;
  double sigma = 1.0;
  double sigma2 = 1.0;
  double m4 = 3.0;  // E[X^4]
  std::string name;

  // Two-point mixture parameters: +-outer with probability outer_weight,
  // +-inner otherwise (each sign equally likely).
  double outer = 0.0;
  double inner = 0.0;
  double outer_weight = 0.0;
};

// Canonical laws scaled to a given sigma. Fourth moments:
//   gaussian 3 sigma^4, rademacher sigma^4, uniform (9/5) sigma^4,
//   twopoint (default shape) 17/6.76 sigma^4.
// UniformSymmetric is uniform on [-sqrt(3) sigma, sqrt(3) sigma].
EntryLaw make_entry_law(LawKind kind, double sigma);

// Mixture of +-outer (probability outer_weight) and +-inner. Realizes any
// m4/sigma^4 >= 1 by choice of the atoms and the weight.
EntryLaw make_two_point_mix(double outer, double inner, double outer_weight);

// Config identifiers: "gaussian", "rademacher", "uniform", "twopoint".
EntryLaw entry_law_from_name(std::string_view name, double sigma);

double sample_entry(const EntryLaw& law, RngStream& rng);

// N(mean, variance); variance must be >= 0.
double sample_gaussian(double mean, double variance, RngStream& rng);

}  // namespace rmtlab
