#pragma once

#include <cstdint>

namespace basisrisk {

// Counter-based uniform stream. Output i depends only on (seed, stream, i),
// so parallel substreams derived from one master seed never overlap and
// replaying a (seed, stream) pair is bit-exact on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform();

  // Standard normal via Box-Muller (one spare cached per pair).
  double normal();

  // Exponential with unit rate.
  double exponential();

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze, boosted for shape < 1.
  double gamma(double shape);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stable per-cell seed for experiment grids: same (master, cell) always maps
// to the same seed, distinct cells to distinct seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell);

}  // namespace basisrisk
