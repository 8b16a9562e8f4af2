#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace pnest {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Thrown when the symbol Gram matrix F̌ᴴSᴴSF̌ is singular or too badly
/// conditioned to define the projector.
class SingularGramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unitary DFT pair: F has entries exp(-j 2 pi k n / N) / sqrt(N).
ComplexVector unitary_dft(const ComplexVector& v);
ComplexVector unitary_idft(const ComplexVector& v);

/// F̌ h: the unitary n_c-point DFT of h zero-padded to n_c.
ComplexVector apply_partial_dft(const ComplexVector& h, Index n_c);

/// Column l of F̌ (the l-th column of the unitary n_c-point DFT matrix).
ComplexVector partial_dft_column(Index n_c, Index l);

/// circ(first_column) * x, evaluated as a circular convolution through the
/// FFT. Entry (i, j) of the implied matrix is first_column[(i - j) mod n].
ComplexVector circulant_multiply(const ComplexVector& first_column, const ComplexVector& x);

/// circ(first_column)ᴴ * x.
ComplexVector circulant_multiply_adjoint(const ComplexVector& first_column,
                                         const ComplexVector& x);

/// Orthogonal projector onto range(S F̌), S = Diag(s).
///
/// Stored factored: the thin n_c x L matrix A = S F̌, an orthonormal basis
/// Q = A R⁻¹ of its range (AᴴA = RᴴR), and the Cholesky factor of AᴴA for
/// least-squares solves. Applying B costs O(n_c L); the dense n_c x n_c
/// matrix is never formed. Immutable after construction.
class ProjectorB {
 public:
  /// Rejects L >= n_c, L < 1, and Gram matrices whose reciprocal condition
  /// estimate is below 1e-12.
  static ProjectorB build(const ComplexVector& symbols, Index channel_length);

  /// B v.
  ComplexVector apply(const ComplexVector& v) const;

  /// (AᴴA)⁻¹ Aᴴ v, the least-squares coefficient vector for v ≈ A x.
  ComplexVector solve_least_squares(const ComplexVector& v) const;

  Index size() const { return columns_.rows(); }
  Index channel_length() const { return columns_.cols(); }

  /// A = S F̌.
  const ComplexMatrix& symbol_columns() const { return columns_; }
  const ComplexVector& symbols() const { return symbols_; }

  /// Reciprocal condition number estimate of AᴴA.
  double gram_rcond() const { return rcond_; }

 private:
  ProjectorB() = default;

  ComplexVector symbols_;
  ComplexMatrix columns_;
  ComplexMatrix basis_;
  Eigen::LLT<ComplexMatrix> gram_factor_;
  double rcond_ = 0.0;
};

inline ProjectorB build_projector(const ComplexVector& symbols, Index channel_length) {
  return ProjectorB::build(symbols, channel_length);
}

inline ComplexVector apply_projector(const ProjectorB& projector, const ComplexVector& v) {
  return projector.apply(v);
}

/// Largest |x_n|² (the squared infinity norm).
double max_abs_squared(const ComplexVector& x);

}  // namespace pnest
