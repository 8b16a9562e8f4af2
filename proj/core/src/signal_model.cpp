#include "pnest/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace pnest {

void WienerPhaseParams::validate() const {
  if (!(sampling_rate_hz > 0.0)) throw std::invalid_argument("wiener: sampling rate must be > 0");
  if (!(delta_f_3db_hz >= 0.0) || !(delta_f_3db_hz < sampling_rate_hz)) {
    throw std::invalid_argument("wiener: 3-dB bandwidth must lie in [0, f_s)");
  }
}

double WienerPhaseParams::increment_variance() const {
  return 2.0 * std::numbers::pi * delta_f_3db_hz / sampling_rate_hz;
}

void GaussianPhaseParams::validate() const {
  if (!(sampling_rate_hz > 0.0)) throw std::invalid_argument("gaussian: sampling rate must be > 0");
  if (!(delta_f_3db_hz > 0.0)) throw std::invalid_argument("gaussian: 3-dB bandwidth must be > 0");
  if (!(theta_rms_deg >= 0.0)) throw std::invalid_argument("gaussian: theta_rms must be >= 0");
}

double GaussianPhaseParams::covariance(Index lag) const {
  const double rms_rad = std::numbers::pi * theta_rms_deg / 180.0;
  return rms_rad * rms_rad *
         std::exp(-2.0 * std::numbers::pi * delta_f_3db_hz * static_cast<double>(std::abs(lag)) /
                  sampling_rate_hz);
}

double GaussianPhaseParams::lag_one_correlation() const {
  return std::exp(-2.0 * std::numbers::pi * delta_f_3db_hz / sampling_rate_hz);
}

void ChannelParams::validate() const {
  if (length < 1) throw std::invalid_argument("channel: length must be >= 1");
  if (!std::isfinite(decay_rate)) throw std::invalid_argument("channel: decay rate not finite");
}

std::vector<double> ChannelParams::power_profile() const {
  validate();
  std::vector<double> power(static_cast<std::size_t>(length));
  double total = 0.0;
  for (Index l = 0; l < length; ++l) {
    power[l] = std::exp(-decay_rate * static_cast<double>(l));
    total += power[l];
  }
  for (double& p : power) p /= total;
  return power;
}

ComplexVector gen_symbols(RandomStream& rng, Index n_c) {
  if (n_c < 1) throw std::invalid_argument("gen_symbols: n_c must be >= 1");
  ComplexVector s(n_c);
  for (Index k = 0; k < n_c; ++k) s[k] = rng.complex_normal(2.0);
  return s;
}

ComplexVector gen_channel(RandomStream& rng, const ChannelParams& params) {
  const std::vector<double> power = params.power_profile();
  ComplexVector h(params.length);
  for (Index l = 0; l < params.length; ++l) h[l] = rng.complex_normal(power[l]);
  return h;
}

RealVector gen_wiener_phase(RandomStream& rng, Index n_c, const WienerPhaseParams& params) {
  if (n_c < 1) throw std::invalid_argument("gen_wiener_phase: n_c must be >= 1");
  params.validate();
  const double stddev = std::sqrt(params.increment_variance());
  RealVector theta(n_c);
  theta[0] = 0.0;
  for (Index n = 1; n < n_c; ++n) theta[n] = theta[n - 1] + rng.normal(stddev);
  return theta;
}

RealVector gen_gaussian_phase(RandomStream& rng, Index n_c, const GaussianPhaseParams& params) {
  if (n_c < 1) throw std::invalid_argument("gen_gaussian_phase: n_c must be >= 1");
  params.validate();
  const double stddev = std::sqrt(params.covariance(0));
  const double rho = params.lag_one_correlation();
  const double innovation = stddev * std::sqrt(1.0 - rho * rho);
  RealVector theta(n_c);
  theta[0] = rng.normal(stddev);
  for (Index n = 1; n < n_c; ++n) theta[n] = rho * theta[n - 1] + rng.normal(innovation);
  return theta;
}

RealVector gen_phase(RandomStream& rng, Index n_c, const PhaseModel& model) {
  return std::visit(
      [&](const auto& params) -> RealVector {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, WienerPhaseParams>) {
          return gen_wiener_phase(rng, n_c, params);
        } else {
          return gen_gaussian_phase(rng, n_c, params);
        }
      },
      model);
}

ComplexVector noiseless_received(const ComplexVector& symbols, const ComplexVector& channel,
                                 const RealVector& theta) {
  const Index n_c = symbols.size();
  if (theta.size() != n_c) {
    throw std::invalid_argument("transmit_receive: theta length " + std::to_string(theta.size()) +
                                " != n_c " + std::to_string(n_c));
  }
  if (channel.size() < 1 || channel.size() > n_c) {
    throw std::invalid_argument("transmit_receive: channel length must lie in [1, n_c]");
  }
  ComplexVector faded = symbols.cwiseProduct(apply_partial_dft(channel, n_c));
  ComplexVector y = std::sqrt(static_cast<double>(n_c)) * unitary_idft(faded);
  for (Index n = 0; n < n_c; ++n) y[n] *= std::polar(1.0, theta[n]);
  return y;
}

BlockRealization transmit_receive(RandomStream& rng, const ComplexVector& symbols,
                                  const ComplexVector& channel, const RealVector& theta,
                                  double noise_sigma) {
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("transmit_receive: noise_sigma < 0");
  BlockRealization block;
  block.symbols = symbols;
  block.channel = channel;
  block.theta = theta;
  block.noise_sigma = noise_sigma;
  block.received_time = noiseless_received(symbols, channel, theta);
  if (noise_sigma > 0.0) {
    const double variance = 2.0 * noise_sigma * noise_sigma;
    for (Index n = 0; n < block.received_time.size(); ++n) {
      block.received_time[n] += rng.complex_normal(variance);
    }
  }
  block.received_freq = unitary_dft(block.received_time);
  return block;
}

double snr_to_sigma(const ComplexVector& symbols, const ComplexVector& channel, Index n_c,
                    double snr_db) {
  if (std::isnan(snr_db)) throw std::invalid_argument("snr_to_sigma: snr_db is NaN");
  if (symbols.size() != n_c) throw std::invalid_argument("snr_to_sigma: symbol length != n_c");
  if (std::isinf(snr_db)) {
    if (snr_db > 0) return 0.0;
    throw std::invalid_argument("snr_to_sigma: snr_db is -inf");
  }
  const double symbol_power = symbols.squaredNorm() / static_cast<double>(n_c);
  const double signal_power = symbol_power * channel.squaredNorm();
  const double noise_power = signal_power / std::pow(10.0, snr_db / 10.0);
  return std::sqrt(noise_power / 2.0);
}

}  // namespace pnest
