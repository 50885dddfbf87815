#ifndef RULEDIST_CORE_RNG_HPP
#define RULEDIST_CORE_RNG_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace ruledist {

// Deterministic random source. All sampling goes through this class instead
// of <random> distributions, whose output is implementation-defined; with a
// fixed seed the whole pipeline produces identical bytes on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for (seed, index) pairs, e.g. one per episode.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53 bits of precision.
  double next_double();

  // Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t n);

  // Index drawn proportionally to the (nonnegative) weights.
  std::size_t sample_weighted(std::span<const double> weights);

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  // xoshiro256** state
  std::uint64_t s_[4];
};

}  // namespace ruledist

#endif
