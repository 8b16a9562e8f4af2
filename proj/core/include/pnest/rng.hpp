#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace pnest {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for the stream identified by (master_seed, stream, substream).
/// Distinct triples give statistically independent engines, so a trial's
/// randomness depends only on its own index and never on scheduling.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream,
                          std::uint64_t substream = 0);

/// Seedable random stream owned by a single trial.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);
  RandomStream(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t substream = 0)
      : RandomStream(derive_seed(master_seed, stream, substream)) {}

  double normal();
  double normal(double stddev) { return stddev * normal(); }
  /// Circularly symmetric complex Gaussian with E|z|² = variance.
  std::complex<double> complex_normal(double variance);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace pnest
