#include "pnest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pnest {
namespace {

constexpr double kArgZero = 1e-300;

void require_unimodular(const ComplexVector& u, const char* what) {
  for (Index n = 0; n < u.size(); ++n) {
    if (!(std::abs(std::abs(u[n]) - 1.0) <= kUnimodularTolerance)) {
      throw std::invalid_argument(std::string(what) + ": entry " + std::to_string(n) +
                                  " is not unimodular");
    }
  }
}

void require_lengths(const ComplexVector& y, const ProjectorB& b, const char* what) {
  if (y.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": received block length " +
                                std::to_string(y.size()) + " != projector size " +
                                std::to_string(b.size()));
  }
}

// One pass through F, B and Fᴴ at the full-length iterate. Every step needs
// Fᴴ B F (y ⊙ u), and the objective at u falls out of the same transform.
struct Evaluation {
  ComplexVector back_projected;  // Fᴴ B F (y ⊙ u)
  double objective = 0.0;
};

Evaluation evaluate(const ComplexVector& u_full, const ComplexVector& y, const ProjectorB& b) {
  ComplexVector spectrum = unitary_dft(y.cwiseProduct(u_full));
  ComplexVector projected = b.apply(spectrum);
  Evaluation e;
  e.objective = (spectrum - projected).squaredNorm();
  e.back_projected = unitary_idft(projected);
  return e;
}

// exp(j arg a), keeping the current entry where arg(a_n) is undefined.
ComplexVector project_unimodular(const ComplexVector& a, const ComplexVector& current) {
  ComplexVector next(a.size());
  for (Index n = 0; n < a.size(); ++n) {
    const double magnitude = std::abs(a[n]);
    next[n] = magnitude < kArgZero ? current[n] : a[n] / magnitude;
  }
  return next;
}

// Surrogate maximizer direction for the selected variant. `u` is the iterate
// at its own length; `u_full` is T u (or u itself when unreduced).
ComplexVector surrogate_direction(MajorizationVariant variant, const PctTransform* t,
                                  const ComplexVector& u, const ComplexVector& u_full,
                                  const ComplexVector& y, const Evaluation& e,
                                  double y_inf_sq) {
  ComplexVector full = y.conjugate().cwiseProduct(e.back_projected);
  if (variant == MajorizationVariant::kLoose) {
    // (λ I - Ṽ) u with Ṽ u = |y|² ⊙ u - Diag(y)ᴴ Fᴴ B F Diag(y) u.
    full -= y.cwiseAbs2().cwiseProduct(u_full);
    if (t == nullptr) return full + y_inf_sq * u;
    return t->adjoint(full) + (y_inf_sq * t->gram_max_eigenvalue()) * u;
  }
  return t == nullptr ? full : t->adjoint(full);
}

ComplexVector step_impl(MajorizationVariant variant, const ComplexVector& u,
                        const ComplexVector& y, const ProjectorB& b, const PctTransform* t) {
  require_lengths(y, b, "mm step");
  require_unimodular(u, "mm step");
  const ComplexVector u_full = t == nullptr ? u : t->expand(u);
  if (u_full.size() != y.size()) throw std::invalid_argument("mm step: iterate length mismatch");
  const Evaluation e = evaluate(u_full, y, b);
  const ComplexVector a = surrogate_direction(variant, t, u, u_full, y, e, max_abs_squared(y));
  return project_unimodular(a, u);
}

}  // namespace

void MmConfig::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("mm config: tolerance must be > 0");
  if (max_iters < 1) throw std::invalid_argument("mm config: max_iters must be >= 1");
}

double objective(const ComplexVector& u, const ComplexVector& y, const ProjectorB& b) {
  require_lengths(y, b, "objective");
  if (u.size() != y.size()) throw std::invalid_argument("objective: u length mismatch");
  require_unimodular(u, "objective");
  ComplexVector spectrum = unitary_dft(y.cwiseProduct(u));
  return (spectrum - b.apply(spectrum)).squaredNorm();
}

ComplexVector tqm_step(const ComplexVector& u, const ComplexVector& y, const ProjectorB& b) {
  return step_impl(MajorizationVariant::kTight, u, y, b, nullptr);
}

ComplexVector lqm_step(const ComplexVector& u, const ComplexVector& y, const ProjectorB& b) {
  return step_impl(MajorizationVariant::kLoose, u, y, b, nullptr);
}

ComplexVector tqm_step_reduced(const ComplexVector& u_reduced, const ComplexVector& y,
                               const ProjectorB& b, const PctTransform& t) {
  return step_impl(MajorizationVariant::kTight, u_reduced, y, b, &t);
}

ComplexVector lqm_step_reduced(const ComplexVector& u_reduced, const ComplexVector& y,
                               const ProjectorB& b, const PctTransform& t) {
  return step_impl(MajorizationVariant::kLoose, u_reduced, y, b, &t);
}

ComplexVector remove_phase_ambiguity(const ComplexVector& u) {
  if (u.size() == 0) return u;
  const double magnitude = std::abs(u[0]);
  if (!(magnitude > 0.0)) throw std::invalid_argument("remove_phase_ambiguity: u_0 is zero");
  const Complex rotation = std::conj(u[0]) / magnitude;
  ComplexVector out = u * rotation;
  out[0] = Complex(1.0, 0.0);
  return out;
}

ComplexVector channel_estimate(const ComplexVector& u, const ComplexVector& y,
                               const ProjectorB& b) {
  require_lengths(y, b, "channel_estimate");
  if (u.size() != y.size()) throw std::invalid_argument("channel_estimate: u length mismatch");
  require_unimodular(u, "channel_estimate");
  const double root_n = std::sqrt(static_cast<double>(y.size()));
  return b.solve_least_squares(unitary_dft(u.cwiseProduct(y))) / root_n;
}

ComplexVector channel_estimate(const ComplexVector& u, const ComplexVector& y,
                               const ComplexVector& symbols, Index channel_length) {
  return channel_estimate(u, y, ProjectorB::build(symbols, channel_length));
}

EstimateResult run_mm(const MmConfig& config, const ComplexVector& y, const ProjectorB& b) {
  config.validate();
  require_lengths(y, b, "run_mm");
  const PctTransform* t = config.reduction ? &*config.reduction : nullptr;
  if (t != nullptr && t->full_length() != y.size()) {
    throw std::invalid_argument("run_mm: PCT full length does not match the block");
  }
  const Index length = t == nullptr ? y.size() : t->reduced_length();

  ComplexVector u = ComplexVector::Ones(length);
  if (config.initial) {
    if (config.initial->size() != length) {
      throw std::invalid_argument("run_mm: initial iterate has length " +
                                  std::to_string(config.initial->size()) + ", expected " +
                                  std::to_string(length));
    }
    require_unimodular(*config.initial, "run_mm initial iterate");
    u = *config.initial;
  }

  const double y_inf_sq = max_abs_squared(y);
  EstimateResult result;
  result.objective_trace.reserve(static_cast<std::size_t>(std::min(config.max_iters, 1 << 16)) + 1);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    const ComplexVector u_full = t == nullptr ? u : t->expand(u);
    const Evaluation e = evaluate(u_full, y, b);
    result.objective_trace.push_back(e.objective);
    ComplexVector next =
        project_unimodular(surrogate_direction(config.variant, t, u, u_full, y, e, y_inf_sq), u);
    const double moved = (next - u).norm();
    result.step_norms.push_back(moved);
    u = std::move(next);
    ++result.iterations;
    if (moved <= config.tolerance) {
      result.converged = true;
      break;
    }
  }

  const ComplexVector final_full = t == nullptr ? u : t->expand(u);
  result.objective_trace.push_back(evaluate(final_full, y, b).objective);
  result.u_star = remove_phase_ambiguity(final_full);
  result.theta_hat = -result.u_star.array().arg();
  result.h_hat = channel_estimate(result.u_star, y, b);
  return result;
}

double bic_score(double objective_value, double sigma_sq, Index n, Index n_c) {
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("bic_score: sigma_sq must be > 0");
  if (n < 1 || n_c < 1) throw std::invalid_argument("bic_score: counts must be >= 1");
  return objective_value / sigma_sq + static_cast<double>(n) * std::log(static_cast<double>(n_c));
}

double plugin_noise_variance(double objective_value, Index n, Index n_c, Index channel_length) {
  const Index dof = 2 * n_c - 2 * channel_length - n + 1;
  if (dof < 1) throw std::invalid_argument("plugin_noise_variance: no residual degrees of freedom");
  return objective_value / static_cast<double>(dof);
}

std::vector<Index> default_pct_candidates(Index n_c) {
  std::vector<Index> candidates;
  for (Index n = 32; n <= n_c; n *= 2) {
    if (n_c % n == 0) candidates.push_back(n);
  }
  if (candidates.empty()) candidates.push_back(n_c);
  return candidates;
}

EstimateResult opt_pct_estimate(const ComplexVector& y, const ProjectorB& b, double sigma_sq,
                                const std::vector<Index>& candidate_ns, const MmConfig& config,
                                const OptPctOptions& options) {
  if (candidate_ns.empty()) throw std::invalid_argument("opt_pct_estimate: empty candidate list");
  require_lengths(y, b, "opt_pct_estimate");
  if (options.noise == NoiseVariance::kKnown && !(sigma_sq > 0.0)) {
    throw std::invalid_argument("opt_pct_estimate: sigma_sq must be > 0");
  }
  const Index n_c = y.size();
  std::vector<PctTransform> transforms;
  transforms.reserve(candidate_ns.size());
  for (Index n : candidate_ns) transforms.emplace_back(n_c, n);

  std::vector<EstimateResult> results;
  std::vector<double> full_objectives;
  results.reserve(transforms.size());
  for (const PctTransform& t : transforms) {
    MmConfig candidate = config;
    candidate.initial.reset();
    if (t.is_identity()) {
      candidate.reduction.reset();
    } else {
      candidate.reduction = t;
    }
    results.push_back(run_mm(candidate, y, b));
    full_objectives.push_back(objective(results.back().u_star, y, b));
  }

  double variance = sigma_sq;
  if (options.noise == NoiseVariance::kPlugin) {
    const auto coarsest = static_cast<std::size_t>(
        std::min_element(candidate_ns.begin(), candidate_ns.end()) - candidate_ns.begin());
    variance = plugin_noise_variance(full_objectives[coarsest], candidate_ns[coarsest], n_c,
                                     b.channel_length());
    if (!(variance > 0.0)) variance = std::numeric_limits<double>::min();
  }

  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const double score = bic_score(full_objectives[i], variance, candidate_ns[i], n_c);
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  EstimateResult chosen = std::move(results[best]);
  chosen.bic = best_score;
  chosen.selected_n = candidate_ns[best];
  return chosen;
}

}  // namespace pnest
