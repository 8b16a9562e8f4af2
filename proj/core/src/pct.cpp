#include <stdexcept>
#include <string>

#include "pnest/estimators.hpp"

namespace pnest {

PctTransform::PctTransform(Index n_c, Index n) : n_c_(n_c), n_(n) {
  if (n < 1 || n > n_c || n_c % n != 0) {
    throw std::invalid_argument("pct: reduced length N=" + std::to_string(n) +
                                " does not divide n_c=" + std::to_string(n_c));
  }
}

ComplexVector PctTransform::expand(const ComplexVector& reduced) const {
  if (reduced.size() != n_) throw std::invalid_argument("pct expand: length mismatch");
  const Index ns = block_size();
  ComplexVector full(n_c_);
  for (Index b = 0; b < n_; ++b) full.segment(b * ns, ns).setConstant(reduced[b]);
  return full;
}

ComplexVector PctTransform::adjoint(const ComplexVector& full) const {
  if (full.size() != n_c_) throw std::invalid_argument("pct adjoint: length mismatch");
  const Index ns = block_size();
  ComplexVector reduced(n_);
  for (Index b = 0; b < n_; ++b) reduced[b] = full.segment(b * ns, ns).sum();
  return reduced;
}

}  // namespace pnest
