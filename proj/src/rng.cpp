#include "tarmos/rng.hpp"

#include <cmath>

#include "tarmos/errors.hpp"

namespace tarmos {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, StreamTag tag, std::uint64_t index) {
  std::uint64_t state = master_seed;
  std::uint64_t a = splitmix64(state);
  state = a ^ (static_cast<std::uint64_t>(tag) * 0xd6e8feb86659fd93ULL);
  std::uint64_t b = splitmix64(state);
  state = b ^ (index + 0x2545f4914f6cdd1dULL);
  return splitmix64(state);
}

double RngStream::uniform01() {
  // 53-bit mantissa shifted into (0,1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::size_t RngStream::uniform_index(std::size_t n) {
  double u = uniform01();
  auto idx = static_cast<std::size_t>(u * static_cast<double>(n));
  return idx >= n ? n - 1 : idx;
}

double RngStream::normal() {
  double u1 = uniform01();
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw NumericError("gamma shape must be positive");
  if (shape < 1.0) {
    // Boost shape by one, then scale by u^(1/shape).
    double u = uniform01();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform01();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return d * v;
    }
  }
}

double RngStream::chisq(double nu) { return 2.0 * gamma(0.5 * nu); }

}  // namespace tarmos
