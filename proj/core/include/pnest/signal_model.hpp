#pragma once

#include <variant>
#include <vector>

#include "pnest/numerics.hpp"
#include "pnest/rng.hpp"

namespace pnest {

/// Free-running oscillator: Wiener phase with increment variance
/// 2 pi delta_f_3db / f_s.
struct WienerPhaseParams {
  double sampling_rate_hz = 20e6;
  double delta_f_3db_hz = 5000.0;

  void validate() const;
  double increment_variance() const;
};

/// PLL oscillator: stationary Gaussian phase with exponential covariance
/// C(i, j) = (pi theta_rms / 180)² exp(-2 pi delta_f_3db |i - j| / f_s).
struct GaussianPhaseParams {
  double sampling_rate_hz = 20e6;
  double delta_f_3db_hz = 100.0;
  double theta_rms_deg = 2.0;

  void validate() const;
  double covariance(Index lag) const;
  double lag_one_correlation() const;
};

using PhaseModel = std::variant<WienerPhaseParams, GaussianPhaseParams>;

/// Rayleigh channel with L taps and exponentially decaying power
/// p_l ∝ exp(-decay_rate l), normalized so the profile sums to one.
struct ChannelParams {
  Index length = 10;
  double decay_rate = 0.7;

  void validate() const;
  std::vector<double> power_profile() const;
};

/// One simulated OFDM block and its ground truth.
struct BlockRealization {
  ComplexVector symbols;        // s, frequency domain
  ComplexVector channel;        // h, length L
  RealVector theta;             // phase noise (radians)
  ComplexVector received_time;  // y
  ComplexVector received_freq;  // r = F y
  double noise_sigma = 0.0;     // per-component standard deviation

  Index n_c() const { return symbols.size(); }
};

/// i.i.d. CN(0, 2) symbols.
ComplexVector gen_symbols(RandomStream& rng, Index n_c);

ComplexVector gen_channel(RandomStream& rng, const ChannelParams& params);

/// theta_0 = 0 followed by i.i.d. Gaussian increments.
RealVector gen_wiener_phase(RandomStream& rng, Index n_c, const WienerPhaseParams& params);

/// Zero-mean Gaussian vector with the exponential covariance, sampled by
/// the equivalent stationary AR(1) recursion.
RealVector gen_gaussian_phase(RandomStream& rng, Index n_c, const GaussianPhaseParams& params);

RealVector gen_phase(RandomStream& rng, Index n_c, const PhaseModel& model);

/// sqrt(n_c) exp(jθ) ⊙ Fᴴ S F̌ h, the noiseless received block.
ComplexVector noiseless_received(const ComplexVector& symbols, const ComplexVector& channel,
                                 const RealVector& theta);

/// y = sqrt(n_c) Diag(e^{jθ}) Fᴴ S F̌ h + v, v ~ CN(0, 2σ² I); r = F y.
BlockRealization transmit_receive(RandomStream& rng, const ComplexVector& symbols,
                                  const ComplexVector& channel, const RealVector& theta,
                                  double noise_sigma);

/// Per-component noise standard deviation σ that puts the block at snr_db,
/// with 2σ² = mean|s|² ‖h‖² / 10^(snr_db / 10).
double snr_to_sigma(const ComplexVector& symbols, const ComplexVector& channel, Index n_c,
                    double snr_db);

}  // namespace pnest
