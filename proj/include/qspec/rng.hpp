#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace qspec {

// Deterministic random source. Gaussian variates are produced by an explicit
// Box-Muller transform rather than std::normal_distribution, whose output
// sequence is implementation-defined; this keeps seeded runs identical across
// standard libraries and machines.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derives an independent stream from a master seed and a stream index.
  // Streams for distinct indices never share state, so parallel consumers
  // can draw in any order without changing results.
  static Rng stream(std::uint64_t master_seed, std::uint64_t stream_id);

  // Uniform on (0, 1); never returns 0 or 1.
  double uniform();

  // Standard normal.
  double gaussian();

  // Standard complex normal with E|z|^2 = 1.
  std::complex<double> complex_gaussian();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 mixing step; used to turn (seed, index) pairs into well
// separated seeds for Rng::stream.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace qspec
