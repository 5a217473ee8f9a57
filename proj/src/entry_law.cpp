#include "rmtlab/entry_law.hpp"

#include <cmath>

#include "rmtlab/errors.hpp"

namespace rmtlab {

EntryLaw make_entry_law(LawKind kind, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("entry law sigma must be positive and finite");
  }
  const double s2 = sigma * sigma;
  EntryLaw law;
  law.kind = kind;
  law.sigma = sigma;
  law.sigma2 = s2;
  switch (kind) {
    case LawKind::Gaussian:
      law.m4 = 3.0 * s2 * s2;
      law.name = "gaussian";
      break;
    case LawKind::Rademacher:
      law.m4 = s2 * s2;
      law.name = "rademacher";
      break;
    case LawKind::UniformSymmetric:
      law.m4 = 1.8 * s2 * s2;
      law.name = "uniform";
      break;
    case LawKind::TwoPointMix: {
      // Default shape: atoms with ratio 3, outer weight 0.2, rescaled to
      // variance sigma^2. m4/sigma^4 = 17/2.6^2 ~ 2.51.
      const double unit = sigma / std::sqrt(2.6);
      EntryLaw mix = make_two_point_mix(3.0 * unit, unit, 0.2);
      mix.name = "twopoint";
      return mix;
    }
  }
  return law;
}

EntryLaw make_two_point_mix(double outer, double inner, double outer_weight) {
  if (!(outer > 0.0) || !(inner >= 0.0) || outer < inner) {
    throw ParameterError("two-point mixture needs outer >= inner > 0");
  }
  if (!(outer_weight > 0.0) || !(outer_weight <= 1.0)) {
    throw ParameterError("two-point mixture weight must be in (0, 1]");
  }
  const double p = outer_weight;
  EntryLaw law;
  law.kind = LawKind::TwoPointMix;
  law.outer = outer;
  law.inner = inner;
  law.outer_weight = p;
  law.sigma2 = p * outer * outer + (1.0 - p) * inner * inner;
  law.sigma = std::sqrt(law.sigma2);
  law.m4 = p * std::pow(outer, 4) + (1.0 - p) * std::pow(inner, 4);
  law.name = "twopoint";
  return law;
}

EntryLaw entry_law_from_name(std::string_view name, double sigma) {
  if (name == "gaussian") return make_entry_law(LawKind::Gaussian, sigma);
  if (name == "rademacher") return make_entry_law(LawKind::Rademacher, sigma);
  if (name == "uniform") {
    return make_entry_law(LawKind::UniformSymmetric, sigma);
  }
  if (name == "twopoint") return make_entry_law(LawKind::TwoPointMix, sigma);
  throw ParameterError("unknown entry law '" + std::string(name) +
                       "' (expected gaussian, rademacher, uniform, twopoint)");
}

double sample_entry(const EntryLaw& law, RngStream& rng) {
  switch (law.kind) {
    case LawKind::Gaussian:
      return law.sigma * rng.next_gaussian();
    case LawKind::Rademacher:
      return (rng.next_u64() & 1u) ? law.sigma : -law.sigma;
    case LawKind::UniformSymmetric:
      return std::sqrt(3.0) * law.sigma * (2.0 * rng.next_uniform01() - 1.0);
    case LawKind::TwoPointMix: {
      // One uniform decides both the component and the sign.
      const double u = rng.next_uniform01();
      const double p = law.outer_weight;
      if (u < p) return (u < 0.5 * p) ? law.outer : -law.outer;
      const double mid = p + 0.5 * (1.0 - p);
      return (u < mid) ? law.inner : -law.inner;
    }
  }
  throw ParameterError("corrupt entry law kind");
}

double sample_gaussian(double mean, double variance, RngStream& rng) {
  if (variance < 0.0 || !std::isfinite(variance) || !std::isfinite(mean)) {
    throw ParameterError("gaussian sampler needs finite mean, variance >= 0");
  }
  return mean + std::sqrt(variance) * rng.next_gaussian();
}

}  // namespace rmtlab
