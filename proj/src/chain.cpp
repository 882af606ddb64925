#include "drm/chain.hpp"

#include <algorithm>

#include "drm/error.hpp"

namespace drm {

namespace {

// Orthonormal (Hermitian) basis of the column span.
Mat orthonormal_span(const Mat& v) {
  if (v.cols() == 0) return Mat(v.rows(), 0);
  Eigen::HouseholderQR<Mat> qr(v);
  return qr.householderQ() * Mat::Identity(v.rows(), v.cols());
}

double span_residual(const Mat& q, const Vec& x) { return max_abs(Vec(x - q * (q.adjoint() * x))); }

double closure_residual(const LieAlgebra& A, const Mat& S) {
  const Mat q = orthonormal_span(S);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < S.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < S.cols(); ++j) {
      worst = std::max(worst, span_residual(q, A.bracket(S.col(i), S.col(j))));
    }
  }
  return worst;
}

bool is_subspace_of(const Mat& inner, const Mat& outer, double tol) {
  const Mat q = orthonormal_span(outer);
  for (Eigen::Index i = 0; i < inner.cols(); ++i) {
    if (span_residual(q, inner.col(i)) > tol) return false;
  }
  return true;
}

Mat left_inverse(const Mat& v) { return v.completeOrthogonalDecomposition().pseudoInverse(); }

}  // namespace

Mat orthogonal_complement(const LieAlgebra& algebra, const Mat& V, const Mat& W) {
  const Mat cross = V.transpose() * algebra.form() * W;  // rows: V, cols: W
  Eigen::FullPivLU<Mat> lu(cross);
  lu.setThreshold(1e-10);
  const Eigen::Index expected = W.cols() - lu.rank();

  std::vector<Eigen::Index> cols;
  const double scale = std::max(1.0, max_abs(cross));
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    if (max_abs(Mat(cross.col(j))) <= 1e-12 * scale) cols.push_back(j);
  }
  if (static_cast<Eigen::Index>(cols.size()) == expected) {
    Mat out(W.rows(), expected);
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = W.col(cols[k]);
    return out;
  }
  const Mat ker = lu.kernel();
  if (ker.cols() == 1 && max_abs(ker) == 0.0) return Mat(W.rows(), 0);
  return W * ker;
}

Chain make_chain(std::shared_ptr<const LieAlgebra> algebra, const Mat& K_basis, const Mat& L_basis,
                 const std::optional<Mat>& explicit_M, double tol) {
  const LieAlgebra& A = *algebra;
  const int n = A.dim();
  if (K_basis.rows() != n || L_basis.rows() != n) throw Error(ErrorKind::BadParams, "subspace bases must have dim rows");
  if (K_basis.cols() == 0) throw Error(ErrorKind::BadParams, "K must be nonzero");
  if (!is_subspace_of(K_basis, L_basis, 1e-12)) throw Error(ErrorKind::BadParams, "K is not contained in L");

  const double scale = std::max(1.0, A.structure().max_abs());
  if (const double r = closure_residual(A, L_basis); r > tol * scale) {
    throw Error(ErrorKind::NotSubalgebra, "L is not closed under the bracket, residual " + std::to_string(r));
  }
  if (const double r = closure_residual(A, K_basis); r > tol * scale) {
    throw Error(ErrorKind::NotSubalgebra, "K is not closed under the bracket, residual " + std::to_string(r));
  }
  if (const double s = relative_min_singular(A.gram(K_basis)); s <= tol) {
    throw Error(ErrorKind::DegenerateRestriction, "form restricted to K is degenerate");
  }
  if (const double s = relative_min_singular(A.gram(L_basis)); s <= tol) {
    throw Error(ErrorKind::DegenerateRestriction, "form restricted to L is degenerate");
  }

  Chain ch;
  ch.algebra_ = algebra;
  ch.K_ = K_basis;
  ch.L_ = L_basis;
  ch.orthogonal_ = !explicit_M.has_value();
  ch.M_ = explicit_M ? *explicit_M : orthogonal_complement(A, K_basis, L_basis);
  if (ch.M_.rows() != n || ch.M_.cols() + ch.K_.cols() != ch.L_.cols()) {
    throw Error(ErrorKind::BadParams, "complement M has the wrong dimension");
  }
  if (!is_subspace_of(ch.M_, L_basis, 1e-12)) throw Error(ErrorKind::BadParams, "M is not contained in L");

  double residual = 0.0;
  if (ch.M_.cols() > 0) {
    const Mat qm = orthonormal_span(ch.M_);
    double leak = 0.0;
    for (Eigen::Index i = 0; i < ch.K_.cols(); ++i) {
      for (Eigen::Index a = 0; a < ch.M_.cols(); ++a) {
        leak = std::max(leak, span_residual(qm, A.bracket(ch.K_.col(i), ch.M_.col(a))));
      }
    }
    if (leak > tol * scale) {
      throw Error(ErrorKind::ComplementNotInvariant, "[K,M] leaks out of M, residual " + std::to_string(leak));
    }
    residual = std::max(residual, leak);
    if (ch.orthogonal_) residual = std::max(residual, max_abs(Mat(ch.M_.transpose() * A.form() * ch.K_)));
  }

  ch.L_perp_ = orthogonal_complement(A, L_basis, Mat::Identity(n, n));
  Mat adapted(n, ch.K_.cols() + ch.M_.cols());
  adapted << ch.K_, ch.M_;
  Mat full(n, n);
  full << adapted, ch.L_perp_;
  Eigen::FullPivLU<Mat> lu(full);
  if (!lu.isInvertible()) throw Error(ErrorKind::DegenerateRestriction, "K + M + L^perp does not span A");
  const Mat inv = lu.inverse();
  const Eigen::Index nk = ch.K_.cols();
  const Eigen::Index nm = ch.M_.cols();
  const Eigen::Index np = ch.L_perp_.cols();
  ch.P_K_ = full.leftCols(nk) * inv.topRows(nk);
  ch.P_M_ = full.middleCols(nk, nm) * inv.middleRows(nk, nm);
  ch.P_L_perp_ = full.rightCols(np) * inv.bottomRows(np);
  residual = std::max(residual, max_abs(Mat(ch.P_K_ + ch.P_M_ + ch.P_L_perp_ - Mat::Identity(n, n))));

  ch.adapted_left_inverse_ = left_inverse(adapted);
  const Mat S = adapted.transpose() * A.form() * ch.L_;
  ch.lift_solver_ = ch.L_ * S.fullPivLu().inverse().leftCols(nk);
  ch.residual_ = residual;
  return ch;
}

Chain make_chain(std::shared_ptr<const LieAlgebra> algebra, const std::vector<int>& K_indices,
                 const std::vector<int>& L_indices, double tol) {
  const int n = algebra->dim();
  std::vector<int> L = L_indices;
  if (L.empty()) {
    for (int a = 0; a < n; ++a) L.push_back(a);
  }
  for (int k : K_indices) {
    if (std::find(L.begin(), L.end(), k) == L.end()) throw Error(ErrorKind::BadParams, "K indices must be a subset of L indices");
  }
  return make_chain(algebra, coordinate_subspace(n, K_indices), coordinate_subspace(n, L), std::nullopt, tol);
}

Vec Chain::lift(const Vec& kappa) const {
  if (orthogonal_) return kappa;
  return lift_solver_ * (K_.transpose() * algebra_->form() * kappa);
}

Vec Chain::adapted_coordinates(const Vec& x) const { return adapted_left_inverse_ * x; }

}  // namespace drm
