#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "drm/lie_algebra.hpp"

namespace drm {

/// A chain K ⊂ L ⊂ A of subalgebras together with a K-invariant complement
/// M of K in L. All subspaces are coefficient matrices over the basis of A
/// (one column per basis vector).
class Chain {
 public:
  const LieAlgebra& algebra() const { return *algebra_; }
  std::shared_ptr<const LieAlgebra> algebra_ptr() const { return algebra_; }

  const Mat& K() const { return K_; }
  const Mat& L() const { return L_; }
  const Mat& M() const { return M_; }
  const Mat& L_perp() const { return L_perp_; }

  const Mat& P_K() const { return P_K_; }
  const Mat& P_M() const { return P_M_; }
  const Mat& P_L_perp() const { return P_L_perp_; }

  bool orthogonal() const { return orthogonal_; }
  int nK() const { return static_cast<int>(K_.cols()); }
  int nM() const { return static_cast<int>(M_.cols()); }

  /// Element of L representing the covector <kappa, .> on K extended by zero
  /// on M. Equals kappa itself when M is the orthogonal complement.
  Vec lift(const Vec& kappa) const;

  /// Coordinates of an element of L in the adapted basis (K columns, then M columns).
  Vec adapted_coordinates(const Vec& x) const;

  /// Largest residual found among the chain invariants at construction.
  double invariant_residual() const { return residual_; }

  friend Chain make_chain(std::shared_ptr<const LieAlgebra>, const Mat&, const Mat&, const std::optional<Mat>&, double);

 private:
  Chain() = default;

  std::shared_ptr<const LieAlgebra> algebra_;
  Mat K_, L_, M_, L_perp_;
  Mat P_K_, P_M_, P_L_perp_;
  Mat adapted_left_inverse_;
  Mat lift_solver_;  // maps <kappa, K_i> to L-coordinates of the lift
  bool orthogonal_ = true;
  double residual_ = 0.0;
};

/// Builds and validates a chain. `explicit_M` selects explicit-complement
/// mode; otherwise M is the B-orthocomplement of K inside L.
/// Errors: NotSubalgebra, ComplementNotInvariant, DegenerateRestriction, BadParams.
Chain make_chain(std::shared_ptr<const LieAlgebra> algebra, const Mat& K_basis, const Mat& L_basis,
                 const std::optional<Mat>& explicit_M = std::nullopt, double tol = 1e-10);

/// Index-set shorthand; an empty L list means L = A.
Chain make_chain(std::shared_ptr<const LieAlgebra> algebra, const std::vector<int>& K_indices,
                 const std::vector<int>& L_indices = {}, double tol = 1e-10);

/// Basis of the B-orthocomplement of span(V) inside span(W) (W defaults to A).
/// Coordinate vectors of W are preferred when they already span it.
Mat orthogonal_complement(const LieAlgebra& algebra, const Mat& V, const Mat& W);

}  // namespace drm
