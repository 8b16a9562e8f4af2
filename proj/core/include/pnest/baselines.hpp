#pragma once

#include <optional>

#include "pnest/estimators.hpp"
#include "pnest/numerics.hpp"

namespace pnest {

/// Budgets for the alternating baselines. AltOpt has no inner loop; each of
/// its alternations counts as one outer iteration.
struct AltConfig {
  double outer_tolerance = 1e-8;
  double inner_tolerance = 1e-8;
  int outer_max_iters = 50;
  int inner_max_iters = 1000;
  /// Estimate c = T č on a PCT grid instead of at full length.
  std::optional<PctTransform> reduction;

  void validate() const;
};

/// The frequency-domain model r ≈ P F c around a fixed channel estimate,
/// with P = circ(S F̌ ĥ). Quantities are obtained through FFT
/// diagonalization of P, never densely.
struct CirculantModel {
  ComplexVector first_column;  // p = S F̌ ĥ
  ComplexVector correlation;   // Fᴴ Pᴴ r
  RealVector gram_diagonal;    // diagonal of Fᴴ Pᴴ P F, = n_c |Fᴴ p|²
  double lambda = 0.0;         // n_c ‖Fᴴ p‖²_∞ = λ_max(Fᴴ Pᴴ P F)
};

CirculantModel make_circulant_model(const ProjectorB& b, const ComplexVector& h,
                                    const ComplexVector& r);

/// ‖r - P F c‖².
double alt_objective(const ComplexVector& c_full, const ComplexVector& r,
                     const CirculantModel& model);

/// AltOpt channel update ĥ = (F̌ᴴSᴴΦᴴΦSF̌)⁻¹F̌ᴴSᴴΦᴴr with Φ = circ(F c) for
/// an arbitrary (not necessarily unimodular) c. `weighted_basis` is
/// √n_c Fᴴ S F̌ (see phase_free_basis).
ComplexVector altopt_channel_update(const ComplexVector& c_full, const ComplexVector& r,
                                    const ComplexMatrix& weighted_basis);

/// √n_c Fᴴ S F̌, the n_c x L matrix mapping h to the phase-free time signal.
ComplexMatrix phase_free_basis(const ProjectorB& b);

/// AltMM channel update (n_c F̌ᴴSᴴSF̌)⁻¹F̌ᴴSᴴΦᴴr, valid for unimodular c.
ComplexVector altmm_channel_update(const ComplexVector& c_full, const ComplexVector& r,
                                   const ProjectorB& b);

/// One inner MM update c⁺ = exp(j arg(Fᴴ Pᴴ r + λ c - Fᴴ Pᴴ P F c)). With a
/// PCT the iterate is reduced and λ is scaled by the block size.
ComplexVector altmm_inner_step(const ComplexVector& c, const CirculantModel& model,
                               const PctTransform* reduction = nullptr);

/// Alternates the two unconstrained least-squares updates. The phase update
/// ignores the unimodular constraint; the final ĉ is normalized to unit
/// modulus only for the returned estimate.
EstimateResult altopt_run(const AltConfig& config, const ComplexVector& r,
                          const ComplexVector& symbols, Index channel_length);

/// Alternating minimization whose phase update is an inner MM loop on the
/// unimodular c.
EstimateResult altmm_run(const AltConfig& config, const ComplexVector& r,
                         const ComplexVector& symbols, Index channel_length);

}  // namespace pnest
