#pragma once

#include <optional>
#include <vector>

#include "pnest/numerics.hpp"

namespace pnest {

/// Piecewise-constant (sample-and-hold) map from a reduced length n to n_c:
/// T is n_c x n with a column of n_s = n_c / n ones in each block.
class PctTransform {
 public:
  /// Throws std::invalid_argument unless 1 <= n <= n_c and n divides n_c.
  PctTransform(Index n_c, Index n);

  Index full_length() const { return n_c_; }
  Index reduced_length() const { return n_; }
  Index block_size() const { return n_c_ / n_; }
  bool is_identity() const { return n_ == n_c_; }

  /// T x̌: repeats each reduced entry block_size() times.
  ComplexVector expand(const ComplexVector& reduced) const;
  /// Tᴴ z: sums z within each block.
  ComplexVector adjoint(const ComplexVector& full) const;

  /// λ_max(TᴴT), which equals block_size() for this structure.
  double gram_max_eigenvalue() const { return static_cast<double>(block_size()); }

 private:
  Index n_c_;
  Index n_;
};

inline PctTransform pct(Index n_c, Index n) { return PctTransform(n_c, n); }

enum class MajorizationVariant {
  kTight,  // TQM: λ = 1 on V, surrogate built from B only
  kLoose,  // LQM: λ = ‖y‖²_∞ (times n_s when reduced) on the weighted matrix
};

struct MmConfig {
  double tolerance = 1e-8;
  int max_iters = 1000;
  MajorizationVariant variant = MajorizationVariant::kTight;
  std::optional<PctTransform> reduction;
  /// Warm start at the iterated length (reduced when a PCT is active).
  /// Defaults to all ones.
  std::optional<ComplexVector> initial;

  void validate() const;
};

struct EstimateResult {
  ComplexVector u_star;  // e^{-jθ̂}, u_star[0] == 1
  RealVector theta_hat;
  ComplexVector h_hat;
  /// f(u⁽⁰⁾), f(u⁽¹⁾), ... ; size iterations + 1 for the MM solvers.
  std::vector<double> objective_trace;
  /// ‖u⁽ᵗ⁺¹⁾ - u⁽ᵗ⁾‖ for each iteration, at the iterated length.
  std::vector<double> step_norms;
  int iterations = 0;
  /// Inner-loop iterations summed over outer iterations (AltMM only).
  int inner_iterations = 0;
  bool converged = false;
  std::optional<double> bic;
  std::optional<Index> selected_n;
};

/// Relative tolerance on |u_n| - 1 accepted by the objective and steps.
inline constexpr double kUnimodularTolerance = 1e-9;

/// ‖(I - B) F (y ⊙ u)‖², i.e. uᴴ Diag(y)ᴴ V Diag(y) u with V = Fᴴ(I - B)F.
/// Throws std::invalid_argument if u is not unimodular to 1e-9.
double objective(const ComplexVector& u, const ComplexVector& y, const ProjectorB& b);

/// TQM update exp(j arg(Diag(y)ᴴ Fᴴ B F Diag(y) u)).
ComplexVector tqm_step(const ComplexVector& u, const ComplexVector& y, const ProjectorB& b);

/// LQM update exp(j arg((‖y‖²_∞ 1 - |y|²) ⊙ u + Diag(y)ᴴ Fᴴ B F Diag(y) u)).
ComplexVector lqm_step(const ComplexVector& u, const ComplexVector& y, const ProjectorB& b);

ComplexVector tqm_step_reduced(const ComplexVector& u_reduced, const ComplexVector& y,
                               const ProjectorB& b, const PctTransform& t);

/// Uses λ = ‖y‖²_∞ n_s.
ComplexVector lqm_step_reduced(const ComplexVector& u_reduced, const ComplexVector& y,
                               const ProjectorB& b, const PctTransform& t);

/// u / u_0: pins the common phase so that the first entry is exactly 1.
ComplexVector remove_phase_ambiguity(const ComplexVector& u);

/// Least-squares channel (1/√n_c)(F̌ᴴSᴴSF̌)⁻¹F̌ᴴSᴴ F (u ⊙ y).
ComplexVector channel_estimate(const ComplexVector& u, const ComplexVector& y,
                               const ProjectorB& b);
ComplexVector channel_estimate(const ComplexVector& u, const ComplexVector& y,
                               const ComplexVector& symbols, Index channel_length);

/// Iterates the configured MM step from the configured start until the
/// iterate moves by at most `tolerance` or `max_iters` is reached, then
/// removes the phase ambiguity and computes the channel estimate.
/// Hitting max_iters is reported through `converged`, not thrown.
EstimateResult run_mm(const MmConfig& config, const ComplexVector& y, const ProjectorB& b);

/// E / σ² + n ln n_c.
double bic_score(double objective_value, double sigma_sq, Index n, Index n_c);

/// Noise variance estimated from a residual: E / (2 n_c - 2 L - n + 1),
/// the residual degrees of freedom of a fit with n phase and L channel
/// parameters.
double plugin_noise_variance(double objective_value, Index n, Index n_c, Index channel_length);

/// 32, 64, ..., n_c (only the powers of two that divide n_c).
std::vector<Index> default_pct_candidates(Index n_c);

enum class NoiseVariance { kKnown, kPlugin };

struct OptPctOptions {
  NoiseVariance noise = NoiseVariance::kKnown;
};

/// Runs run_mm once per candidate reduced length and returns the estimate
/// with the smallest BIC, scored on the full-length objective of the
/// expanded estimate. `config.reduction` is ignored. With kPlugin,
/// `sigma_sq` is ignored and σ² is estimated from the coarsest candidate.
EstimateResult opt_pct_estimate(const ComplexVector& y, const ProjectorB& b, double sigma_sq,
                                const std::vector<Index>& candidate_ns, const MmConfig& config,
                                const OptPctOptions& options = {});

}  // namespace pnest
