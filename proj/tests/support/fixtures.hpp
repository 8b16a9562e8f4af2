#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "pnest/numerics.hpp"
#include "pnest/rng.hpp"
#include "pnest/signal_model.hpp"

namespace pnest::testing {

/// A synthetic block with directly controlled phase and noise.
struct Instance {
  ComplexVector s;
  ComplexVector h;
  RealVector theta;
  ComplexVector y;
  ComplexVector r;
  double sigma = 0.0;
};

inline ComplexVector random_complex(RandomStream& rng, Index n, double variance = 2.0) {
  ComplexVector v(n);
  for (Index k = 0; k < n; ++k) v[k] = rng.complex_normal(variance);
  return v;
}

inline RealVector random_angles(RandomStream& rng, Index n, double scale = std::numbers::pi) {
  RealVector a(n);
  for (Index k = 0; k < n; ++k) a[k] = scale * (2.0 * std::generate_canonical<double, 53>(rng.engine()) - 1.0);
  return a;
}

inline ComplexVector unit_phasors(const RealVector& angles) {
  ComplexVector u(angles.size());
  for (Index k = 0; k < angles.size(); ++k) u[k] = std::polar(1.0, angles[k]);
  return u;
}

inline ComplexVector random_unimodular(RandomStream& rng, Index n) {
  return unit_phasors(random_angles(rng, n));
}

/// Wiener phase with increments of standard deviation `step`, theta[0] = 0.
inline RealVector random_walk(RandomStream& rng, Index n, double step) {
  RealVector theta(n);
  theta[0] = 0.0;
  for (Index k = 1; k < n; ++k) theta[k] = theta[k - 1] + rng.normal(step);
  return theta;
}

/// Piecewise-constant phase on a grid of n_reduced blocks, theta[0] = 0.
inline RealVector blockwise_walk(RandomStream& rng, Index n_c, Index n_reduced, double step) {
  const RealVector coarse = random_walk(rng, n_reduced, step);
  const Index block = n_c / n_reduced;
  RealVector theta(n_c);
  for (Index k = 0; k < n_c; ++k) theta[k] = coarse[k / block];
  return theta;
}

inline Instance make_instance(std::uint64_t seed, Index n_c, Index l, const RealVector& theta,
                              double sigma) {
  RandomStream rng(seed, 0, 0);
  Instance inst;
  inst.s = gen_symbols(rng, n_c);
  inst.h = gen_channel(rng, ChannelParams{l, 0.7});
  inst.theta = theta;
  inst.sigma = sigma;
  BlockRealization block = transmit_receive(rng, inst.s, inst.h, theta, sigma);
  inst.y = block.received_time;
  inst.r = block.received_freq;
  return inst;
}

inline Instance make_instance(std::uint64_t seed, Index n_c, Index l, double phase_step,
                              double sigma) {
  RandomStream rng(seed, 1, 0);
  return make_instance(seed, n_c, l, random_walk(rng, n_c, phase_step), sigma);
}

inline double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline double max_unimodular_deviation(const ComplexVector& u) {
  return (u.cwiseAbs().array() - 1.0).abs().maxCoeff();
}

}  // namespace pnest::testing
