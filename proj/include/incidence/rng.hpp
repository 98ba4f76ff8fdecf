#pragma once

#include <cmath>
#include <cstdint>

namespace incidence::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stateless counter hash: each (seed, stream, a, b) tuple owns exactly one
// draw, so draws for a given row never depend on how many other rows exist.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix64(seed ^ 0xA0761D6478BD642FULL);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return h;
}

// Uniform on (0, 1]; never 0, so -log(u) and 1/u stay finite.
inline double uniform_pos(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t a, std::uint64_t b) {
  return (static_cast<double>(counter_hash(seed, stream, a, b) >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal via Box-Muller; consumes counters (a, 2b) and (a, 2b+1).
inline double normal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t a, std::uint64_t b) {
  const double u1 = uniform_pos(seed, stream, a, 2 * b);
  const double u2 = uniform_pos(seed, stream, a, 2 * b + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Weibull draw with the usual inverse-CDF transform.
inline double weibull(double u_pos, double shape, double scale) {
  return scale * std::pow(-std::log(u_pos), 1.0 / shape);
}

}  // namespace incidence::rng
