#include "qspec/rng.hpp"

#include <cmath>

namespace qspec {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  std::uint64_t state = master_seed;
  std::uint64_t a = splitmix64(state);
  state ^= stream_id * 0xda942042e4dd58b5ULL;
  std::uint64_t b = splitmix64(state);
  return Rng(a ^ (b + 0x632be59bd9b4e019ULL));
}

double Rng::uniform() {
  // 53-bit mantissa, shifted into (0, 1).
  std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

std::complex<double> Rng::complex_gaussian() {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  double re = gaussian();
  double im = gaussian();
  return {re * inv_sqrt2, im * inv_sqrt2};
}

}  // namespace qspec
