#include "pnest/numerics.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

namespace pnest {
namespace {

// FFTW planning is not thread-safe but execution of an existing plan on new
// arrays is, so plans are created under a lock and shared afterwards.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    ComplexVector scratch(n);
    auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(n, data, data, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fftw: failed to create plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

ComplexVector transform(const ComplexVector& v, int sign) {
  if (v.size() == 0) throw std::invalid_argument("dft: empty input");
  ComplexVector out = v;
  auto* data = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan_cache().get(static_cast<int>(v.size()), sign), data, data);
  out *= 1.0 / std::sqrt(static_cast<double>(v.size()));
  return out;
}

}  // namespace

ComplexVector unitary_dft(const ComplexVector& v) { return transform(v, FFTW_FORWARD); }

ComplexVector unitary_idft(const ComplexVector& v) { return transform(v, FFTW_BACKWARD); }

ComplexVector apply_partial_dft(const ComplexVector& h, Index n_c) {
  if (h.size() == 0) throw std::invalid_argument("apply_partial_dft: empty channel");
  if (h.size() > n_c) {
    throw std::invalid_argument("apply_partial_dft: channel length " + std::to_string(h.size()) +
                                " exceeds n_c " + std::to_string(n_c));
  }
  ComplexVector padded = ComplexVector::Zero(n_c);
  padded.head(h.size()) = h;
  return unitary_dft(padded);
}

ComplexVector partial_dft_column(Index n_c, Index l) {
  ComplexVector column(n_c);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_c));
  for (Index k = 0; k < n_c; ++k) {
    // Reduce k*l mod n_c first so the angle stays accurate for large indices.
    const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * l) % n_c) /
                         static_cast<double>(n_c);
    column[k] = std::polar(scale, angle);
  }
  return column;
}

ComplexVector circulant_multiply(const ComplexVector& first_column, const ComplexVector& x) {
  if (first_column.size() != x.size()) {
    throw std::invalid_argument("circulant_multiply: length mismatch");
  }
  const double root_n = std::sqrt(static_cast<double>(x.size()));
  ComplexVector spectrum = unitary_dft(first_column).cwiseProduct(unitary_dft(x));
  return root_n * unitary_idft(spectrum);
}

ComplexVector circulant_multiply_adjoint(const ComplexVector& first_column,
                                         const ComplexVector& x) {
  if (first_column.size() != x.size()) {
    throw std::invalid_argument("circulant_multiply_adjoint: length mismatch");
  }
  const double root_n = std::sqrt(static_cast<double>(x.size()));
  ComplexVector spectrum = unitary_dft(first_column).conjugate().cwiseProduct(unitary_dft(x));
  return root_n * unitary_idft(spectrum);
}

ProjectorB ProjectorB::build(const ComplexVector& symbols, Index channel_length) {
  const Index n_c = symbols.size();
  if (channel_length < 1) throw std::invalid_argument("build_projector: channel length < 1");
  if (channel_length >= n_c) {
    throw std::invalid_argument("build_projector: channel length " +
                                std::to_string(channel_length) + " must be below n_c " +
                                std::to_string(n_c));
  }
  if (!symbols.allFinite()) throw std::invalid_argument("build_projector: non-finite symbols");

  ProjectorB p;
  p.symbols_ = symbols;
  p.columns_.resize(n_c, channel_length);
  for (Index l = 0; l < channel_length; ++l) {
    p.columns_.col(l) = symbols.cwiseProduct(partial_dft_column(n_c, l));
  }

  ComplexMatrix gram = p.columns_.adjoint() * p.columns_;
  p.gram_factor_.compute(gram);
  if (p.gram_factor_.info() != Eigen::Success) {
    throw SingularGramError("build_projector: Gram matrix is not positive definite");
  }
  p.rcond_ = p.gram_factor_.rcond();
  if (!(p.rcond_ >= 1e-12)) {
    throw SingularGramError("build_projector: Gram matrix condition estimate " +
                            std::to_string(1.0 / p.rcond_) + " exceeds 1e12");
  }
  // Q = A U⁻¹ with AᴴA = Uᴴ U, i.e. Qᴴ = L⁻¹ Aᴴ.
  ComplexMatrix basis_adjoint = p.gram_factor_.matrixL().solve(p.columns_.adjoint());
  p.basis_ = basis_adjoint.adjoint();
  return p;
}

ComplexVector ProjectorB::apply(const ComplexVector& v) const {
  if (v.size() != size()) {
    throw std::invalid_argument("apply_projector: length " + std::to_string(v.size()) +
                                " does not match n_c " + std::to_string(size()));
  }
  ComplexVector coefficients = basis_.adjoint() * v;
  return basis_ * coefficients;
}

ComplexVector ProjectorB::solve_least_squares(const ComplexVector& v) const {
  if (v.size() != size()) throw std::invalid_argument("solve_least_squares: length mismatch");
  ComplexVector rhs = columns_.adjoint() * v;
  return gram_factor_.solve(rhs);
}

double max_abs_squared(const ComplexVector& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs2().maxCoeff();
}

}  // namespace pnest
