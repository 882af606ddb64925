#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drm/tensor3.hpp"
#include "drm/types.hpp"

namespace drm {

/// Residuals of the four self-dual Lie algebra axioms, each with the index
/// tuple where it is worst. Residuals are absolute; `scale` gives the
/// normalisation used when comparing against a relative tolerance.
struct AxiomReport {
  double antisymmetry = 0.0;
  std::array<int, 3> antisymmetry_at{-1, -1, -1};
  double jacobi = 0.0;
  std::array<int, 4> jacobi_at{-1, -1, -1, -1};
  double invariance = 0.0;
  std::array<int, 3> invariance_at{-1, -1, -1};
  double min_singular = 0.0;  ///< smallest singular value of the form
  double max_singular = 0.0;
  double structure_scale = 0.0;  ///< max |f|
  double form_scale = 0.0;       ///< max |B|
};

AxiomReport check_axioms(const Tensor3& f, const Mat& form);

/// Finite-dimensional complex Lie algebra with a nondegenerate invariant
/// symmetric bilinear form, given by structure constants in a fixed basis:
/// [T_a, T_b] = f(a,b,c) T_c and B(a,b) = <T_a, T_b>.
///
/// Instances are immutable and validated at construction.
class LieAlgebra {
 public:
  /// Validates antisymmetry, Jacobi, invariance and nondegeneracy (in that
  /// order) and throws drm::Error naming the worst offending indices.
  static LieAlgebra build(Tensor3 f, Mat form, std::vector<std::string> labels, double tol = 1e-10);

  int dim() const { return f_.dim(); }
  const Tensor3& structure() const { return f_; }
  cplx f(int a, int b, int c) const { return f_(a, b, c); }
  const Mat& form() const { return form_; }
  const Mat& form_inverse() const { return form_inv_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<int> index_of(std::string_view label) const;

  Vec basis_vector(int a) const;
  Vec bracket(const Vec& x, const Vec& y) const;

  /// Matrix of ad x: (ad x) y == bracket(x, y).
  Mat ad(const Vec& x) const;
  const Mat& ad_basis(int a) const { return ad_basis_[static_cast<std::size_t>(a)]; }

  cplx pairing(const Vec& x, const Vec& y) const { return (x.transpose() * form_ * y)(0, 0); }
  Mat gram(const Mat& columns) const { return columns.transpose() * form_ * columns; }

 private:
  LieAlgebra(Tensor3 f, Mat form, std::vector<std::string> labels);

  Tensor3 f_;
  Mat form_;
  Mat form_inv_;
  std::vector<std::string> labels_;
  std::vector<Mat> ad_basis_;
};

/// Smallest singular value of `m` divided by max(1, largest singular value).
double relative_min_singular(const Mat& m);

/// Basis {v^j} with <v_i, v^j> = delta_ij for the columns v_i of `subspace`.
/// Throws DegenerateRestriction when the form restricted to the subspace is
/// (numerically) degenerate.
Mat dual_basis(const LieAlgebra& algebra, const Mat& subspace, double tol = 1e-10);

/// Coordinate subspace spanned by the given basis indices.
Mat coordinate_subspace(int dim, const std::vector<int>& indices);

/// The invariant tensors of the algebra: the identity tensor
/// I = T_a (x) T^a (as a coefficient matrix) and the bracket tensor
/// f_hat = f_{ab}^c T^a (x) T^b (x) T_c.
struct CanonicalTensors {
  Mat identity;
  Tensor3 bracket;
};

CanonicalTensors canonical_tensors(const LieAlgebra& algebra);

}  // namespace drm
