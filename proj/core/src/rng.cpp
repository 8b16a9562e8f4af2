#include "pnest/rng.hpp"

#include <cmath>

namespace pnest {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream,
                          std::uint64_t substream) {
  return mix_seed(mix_seed(mix_seed(master_seed) ^ stream) ^ (substream * 0x2545f4914f6cdd1dULL));
}

RandomStream::RandomStream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

double RandomStream::normal() { return normal_(engine_); }

std::complex<double> RandomStream::complex_normal(double variance) {
  const double component = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {component * re, component * im};
}

}  // namespace pnest
