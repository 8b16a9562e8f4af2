#include "pnest/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace pnest {
namespace {

// Relative floor on the eigenvalues of Fᴴ Pᴴ P F in the AltOpt phase update.
constexpr double kEigenFloor = 1e-12;

ComplexVector expand_or_copy(const PctTransform* t, const ComplexVector& c) {
  return t == nullptr ? c : t->expand(c);
}

ComplexVector unit_modulus(const ComplexVector& c) {
  ComplexVector out(c.size());
  for (Index n = 0; n < c.size(); ++n) {
    const double magnitude = std::abs(c[n]);
    out[n] = magnitude > 0.0 ? c[n] / magnitude : Complex(1.0, 0.0);
  }
  return out;
}

void require_block(const ComplexVector& r, const ComplexVector& symbols, const PctTransform* t) {
  if (r.size() != symbols.size()) {
    throw std::invalid_argument("baseline: received block length " + std::to_string(r.size()) +
                                " != symbol length " + std::to_string(symbols.size()));
  }
  if (t != nullptr && t->full_length() != r.size()) {
    throw std::invalid_argument("baseline: PCT full length does not match the block");
  }
}

// Shared tail: normalize ĉ, pin the common phase and rotate ĥ to match.
EstimateResult finish(EstimateResult result, const ComplexVector& c_full,
                      const ComplexVector& h) {
  const ComplexVector u = unit_modulus(c_full).conjugate();
  result.u_star = remove_phase_ambiguity(u);
  const Complex rotation = std::conj(u[0]) / std::abs(u[0]);
  result.h_hat = h * rotation;
  result.theta_hat = -result.u_star.array().arg();
  return result;
}

}  // namespace

void AltConfig::validate() const {
  if (!(outer_tolerance > 0.0) || !(inner_tolerance > 0.0)) {
    throw std::invalid_argument("alt config: tolerances must be > 0");
  }
  if (outer_max_iters < 1 || inner_max_iters < 1) {
    throw std::invalid_argument("alt config: iteration budgets must be >= 1");
  }
}

CirculantModel make_circulant_model(const ProjectorB& b, const ComplexVector& h,
                                    const ComplexVector& r) {
  if (h.size() != b.channel_length()) throw std::invalid_argument("circulant model: bad h length");
  if (r.size() != b.size()) throw std::invalid_argument("circulant model: bad r length");
  const double n_c = static_cast<double>(b.size());
  CirculantModel model;
  model.first_column = b.symbol_columns() * h;
  model.correlation = unitary_idft(circulant_multiply_adjoint(model.first_column, r));
  // P = √n_c Fᴴ Diag(F p) F, so Fᴴ Pᴴ P F = n_c Diag(|Fᴴ p|²).
  model.gram_diagonal = n_c * unitary_idft(model.first_column).cwiseAbs2();
  model.lambda = model.gram_diagonal.maxCoeff();
  return model;
}

double alt_objective(const ComplexVector& c_full, const ComplexVector& r,
                     const CirculantModel& model) {
  if (c_full.size() != r.size()) throw std::invalid_argument("alt_objective: length mismatch");
  return (r - circulant_multiply(model.first_column, unitary_dft(c_full))).squaredNorm();
}

ComplexMatrix phase_free_basis(const ProjectorB& b) {
  const Index n_c = b.size();
  const double root_n = std::sqrt(static_cast<double>(n_c));
  ComplexMatrix basis(n_c, b.channel_length());
  for (Index l = 0; l < b.channel_length(); ++l) {
    basis.col(l) = root_n * unitary_idft(b.symbol_columns().col(l));
  }
  return basis;
}

ComplexVector altopt_channel_update(const ComplexVector& c_full, const ComplexVector& r,
                                    const ComplexMatrix& weighted_basis) {
  if (c_full.size() != weighted_basis.rows() || r.size() != weighted_basis.rows()) {
    throw std::invalid_argument("altopt_channel_update: length mismatch");
  }
  // Φ S F̌ = F Diag(c) (√n_c Fᴴ S F̌), so the normal equations live in time.
  const ComplexVector y = unitary_idft(r);
  const ComplexMatrix weighted = c_full.asDiagonal() * weighted_basis;
  const ComplexMatrix gram = weighted.adjoint() * weighted;
  Eigen::LLT<ComplexMatrix> factor(gram);
  if (factor.info() != Eigen::Success || !(factor.rcond() >= 1e-12)) {
    throw SingularGramError("altopt_channel_update: singular Gram matrix");
  }
  return factor.solve(weighted.adjoint() * y);
}

ComplexVector altmm_channel_update(const ComplexVector& c_full, const ComplexVector& r,
                                   const ProjectorB& b) {
  if (c_full.size() != b.size() || r.size() != b.size()) {
    throw std::invalid_argument("altmm_channel_update: length mismatch");
  }
  const ComplexVector phi_adjoint_r = circulant_multiply_adjoint(unitary_dft(c_full), r);
  return b.solve_least_squares(phi_adjoint_r) / static_cast<double>(b.size());
}

ComplexVector altmm_inner_step(const ComplexVector& c, const CirculantModel& model,
                               const PctTransform* reduction) {
  ComplexVector a;
  if (reduction == nullptr) {
    if (c.size() != model.correlation.size()) {
      throw std::invalid_argument("altmm_inner_step: length mismatch");
    }
    a = model.correlation + model.lambda * c - model.gram_diagonal.cwiseProduct(c);
  } else {
    const ComplexVector c_full = reduction->expand(c);
    a = reduction->adjoint(model.correlation - model.gram_diagonal.cwiseProduct(c_full)) +
        (model.lambda * reduction->gram_max_eigenvalue()) * c;
  }
  ComplexVector next(c.size());
  for (Index n = 0; n < c.size(); ++n) {
    const double magnitude = std::abs(a[n]);
    next[n] = magnitude < 1e-300 ? c[n] : a[n] / magnitude;
  }
  return next;
}

EstimateResult altopt_run(const AltConfig& config, const ComplexVector& r,
                          const ComplexVector& symbols, Index channel_length) {
  config.validate();
  const PctTransform* t = config.reduction ? &*config.reduction : nullptr;
  require_block(r, symbols, t);
  const ProjectorB b = ProjectorB::build(symbols, channel_length);
  const ComplexMatrix basis = phase_free_basis(b);

  ComplexVector c = ComplexVector::Ones(t == nullptr ? r.size() : t->reduced_length());
  ComplexVector h;
  EstimateResult result;
  for (int iter = 0; iter < config.outer_max_iters; ++iter) {
    h = altopt_channel_update(expand_or_copy(t, c), r, basis);
    const CirculantModel model = make_circulant_model(b, h, r);

    // ĉ = (Fᴴ Pᴴ P F)⁻¹ Fᴴ Pᴴ r, restricted to range(T) when reduced.
    const double floor = kEigenFloor * model.lambda;
    ComplexVector next;
    if (t == nullptr) {
      next = model.correlation.cwiseQuotient(
          model.gram_diagonal.cwiseMax(floor).cast<Complex>());
    } else {
      const ComplexVector weights = t->adjoint(model.gram_diagonal.cast<Complex>());
      const ComplexVector rhs = t->adjoint(model.correlation);
      next.resize(rhs.size());
      for (Index k = 0; k < rhs.size(); ++k) {
        next[k] = rhs[k] / std::max(weights[k].real(), floor);
      }
    }
    result.objective_trace.push_back(alt_objective(expand_or_copy(t, next), r, model));
    const double moved = (next - c).norm();
    result.step_norms.push_back(moved);
    c = std::move(next);
    ++result.iterations;
    if (moved <= config.outer_tolerance) {
      result.converged = true;
      break;
    }
  }
  return finish(std::move(result), expand_or_copy(t, c), h);
}

EstimateResult altmm_run(const AltConfig& config, const ComplexVector& r,
                         const ComplexVector& symbols, Index channel_length) {
  config.validate();
  const PctTransform* t = config.reduction ? &*config.reduction : nullptr;
  require_block(r, symbols, t);
  const ProjectorB b = ProjectorB::build(symbols, channel_length);

  ComplexVector c = ComplexVector::Ones(t == nullptr ? r.size() : t->reduced_length());
  ComplexVector h;
  EstimateResult result;
  for (int iter = 0; iter < config.outer_max_iters; ++iter) {
    h = altmm_channel_update(expand_or_copy(t, c), r, b);
    const CirculantModel model = make_circulant_model(b, h, r);

    ComplexVector inner = c;
    for (int step = 0; step < config.inner_max_iters; ++step) {
      ComplexVector next = altmm_inner_step(inner, model, t);
      const double moved = (next - inner).norm();
      inner = std::move(next);
      ++result.inner_iterations;
      if (moved <= config.inner_tolerance) break;
    }

    result.objective_trace.push_back(alt_objective(expand_or_copy(t, inner), r, model));
    const double moved = (inner - c).norm();
    result.step_norms.push_back(moved);
    c = std::move(inner);
    ++result.iterations;
    if (moved <= config.outer_tolerance) {
      result.converged = true;
      break;
    }
  }
  return finish(std::move(result), expand_or_copy(t, c), h);
}

}  // namespace pnest
