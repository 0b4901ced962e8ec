#ifndef TARMOS_RNG_HPP
#define TARMOS_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace tarmos {

// Stream purpose tags keep derived streams from colliding when the same
// master seed feeds chains, simulation replications and initial fills.
enum class StreamTag : std::uint64_t {
  Chain = 1,
  Replication = 2,
  Generator = 3,
};

std::uint64_t splitmix64(std::uint64_t& state);

// Fixed mixing function of (master_seed, tag, index) -> substream seed.
std::uint64_t derive_seed(std::uint64_t master_seed, StreamTag tag, std::uint64_t index);

// Deterministic random stream. All variates are produced from mt19937_64
// through our own transforms so that output is identical across platforms
// and standard-library versions (std::normal_distribution et al. are
// implementation-defined).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0,1); never returns an endpoint.
  double uniform01();

  // Uniform integer in [0, n). n must be >= 1. Consumes exactly one draw.
  std::size_t uniform_index(std::size_t n);

  // Standard normal via Box-Muller; consumes exactly two draws.
  double normal();

  // Gamma(shape, scale=1) by Marsaglia-Tsang squeeze; shape > 0.
  double gamma(double shape);

  // Chi-square with nu degrees of freedom, nu > 0.
  double chisq(double nu);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tarmos

#endif
