#pragma once

#include <cstdint>
#include <random>

namespace rmtlab {

// Reproducible random stream addressed by (seed, stream_id).
//
// Stream state is derived from the pair through a splitmix64 key schedule, so
// replication r can draw from stream_id = r regardless of which worker thread
// runs it: results are independent of scheduling order and of the number of
// workers. Identical (seed, stream_id) always reproduces the identical
// sequence; distinct stream_ids give statistically independent streams.
//
// All variate generation (uniform, gaussian) is implemented on top of the raw
// 64-bit output so sequences do not depend on standard-library distribution
// internals.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Fresh stream with the same master seed and another id.
  RngStream substream(std::uint64_t stream_id) const {
    return RngStream(seed_, stream_id);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double next_uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the sine partner is cached.
  double next_gaussian();

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  double pending_ = 0.0;
  bool has_pending_ = false;
};

}  // namespace rmtlab
