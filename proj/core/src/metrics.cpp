#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pnest/harness.hpp"

namespace pnest {

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, two_pi);
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  return wrapped;
}

RealVector unwrap_phase(const RealVector& wrapped) {
  RealVector out = wrapped;
  for (Index n = 1; n < out.size(); ++n) {
    out[n] = out[n - 1] + wrap_angle(wrapped[n] - wrapped[n - 1]);
  }
  return out;
}

double phase_mse(const RealVector& theta_hat, const RealVector& theta_true) {
  if (theta_hat.size() != theta_true.size()) {
    throw std::invalid_argument("phase_mse: length mismatch");
  }
  const RealVector diff = theta_hat - theta_true;
  Complex sum(0.0, 0.0);
  for (Index n = 0; n < diff.size(); ++n) sum += std::polar(1.0, diff[n]);
  const double alpha = std::abs(sum) > 0.0 ? std::arg(sum) : 0.0;
  double total = 0.0;
  for (Index n = 0; n < diff.size(); ++n) {
    const double e = wrap_angle(diff[n] - alpha);
    total += e * e;
  }
  return total;
}

double channel_mse(const ComplexVector& h_hat, const ComplexVector& h_true) {
  if (h_hat.size() != h_true.size()) throw std::invalid_argument("channel_mse: length mismatch");
  const double value =
      h_hat.squaredNorm() + h_true.squaredNorm() - 2.0 * std::abs(h_hat.dot(h_true));
  return value > 0.0 ? value : 0.0;
}

}  // namespace pnest
