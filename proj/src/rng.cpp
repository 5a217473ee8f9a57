#include "rmtlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace rmtlab {

namespace {

std::uint64_t splitmix_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // Key schedule: two words from the seed, then fold the stream counter in
  // and draw two more. Injective in stream_id for a fixed seed.
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix_next(s);
  const std::uint64_t b = splitmix_next(s);
  s ^= 0x9E3779B97F4A7C15ull * (stream_id + 1);
  const std::uint64_t c = splitmix_next(s);
  const std::uint64_t d = splitmix_next(s);
  std::seed_seq seq{
      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
      static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
  engine_.seed(seq);
}

double RngStream::next_gaussian() {
  if (has_pending_) {
    has_pending_ = false;
    return pending_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - next_uniform01();
  const double u2 = next_uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  pending_ = r * std::sin(phi);
  has_pending_ = true;
  return r * std::cos(phi);
}

}  // namespace rmtlab
