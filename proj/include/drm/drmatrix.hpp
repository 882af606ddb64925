#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "drm/chain.hpp"
#include "drm/funcalc.hpp"
#include "drm/lie_algebra.hpp"

namespace drm {

enum class DerivMode { Auto, FiniteDifference, Exact };

/// A map kappa -> r^{ab}(kappa), r = r^{ab} T_a (x) T_b, defined on (an open
/// subset of) the dynamical subalgebra spanned by `dyn_basis`. kappa is
/// always a coefficient vector over the basis of the ambient algebra.
///
/// `eval` throws drm::Error outside the domain.
struct RMatrixField {
  std::shared_ptr<const LieAlgebra> algebra;
  Mat dyn_basis;
  Mat sym_part;
  std::string construction;
  std::function<Mat(const Vec&)> eval_fn;
  std::function<Mat(const Vec&, const Vec&)> exact_derivative_fn;  // (kappa, direction)
  double fd_step = 1e-5;

  int dim() const { return algebra->dim(); }
  Mat eval(const Vec& kappa) const { return eval_fn(kappa); }
  bool has_exact_derivative() const { return static_cast<bool>(exact_derivative_fn); }

  /// d/dt r(kappa + t X) at t = 0. FiniteDifference uses central differences
  /// with one Richardson step; Auto prefers the exact path when present.
  Mat derivative(const Vec& kappa, const Vec& direction, DerivMode mode = DerivMode::Auto) const;

  /// True when eval(kappa) succeeds (domain errors only; other errors propagate).
  bool in_domain(const Vec& kappa) const;
};

/// Operator form R = r B, i.e. R z = r^{ab} <T_b, z> T_a.
Mat to_operator(const LieAlgebra& A, const Mat& r);
Mat to_tensor(const LieAlgebra& A, const Mat& R);

/// kappa-independent field (r^s or a reference constant); dyn subalgebra as given.
RMatrixField constant_field(std::shared_ptr<const LieAlgebra> A, const Mat& dyn_basis, const Mat& r, std::string name);
RMatrixField zero_field(std::shared_ptr<const LieAlgebra> A, const Mat& dyn_basis);

/// r - sym_part.
RMatrixField antisymmetric_part(const RMatrixField& r);
/// r + c with c constant; sym_part gains the symmetric part of c.
RMatrixField add_constant(const RMatrixField& r, const Mat& c, std::string name);

/// rho_pm(lambda) = f(ad lambda) +- I/2 with L = A.
RMatrixField canonical_r(std::shared_ptr<const LieAlgebra> A, int sign, FuncalcOptions opts = {});

/// C_{ab}(kappa) = -<kappa, P_K [M_a, M_b]>.
Mat c_matrix(const Chain& chain, const Vec& kappa);

/// D(kappa) = D^{ab} M_a (x) M_b with D = C^{-1}. SingularC when cond(C) >= cond_max.
Mat dirac_D(const Chain& chain, const Vec& kappa, double cond_max = 1e8);
/// d/dt D(kappa + tX) = -M D C(X) D M^T.
Mat dirac_D_derivative(const Chain& chain, const Vec& kappa, const Vec& direction, double cond_max = 1e8);

/// The correction field D on K.
RMatrixField dirac_field(std::shared_ptr<const Chain> chain);

/// r*(kappa) = r(lift kappa) + D(kappa). r must be dynamical over the chain's L.
RMatrixField reduce(const RMatrixField& r, std::shared_ptr<const Chain> chain);

/// Direct construction on K in A with M = K^perp:
/// f(ad kappa) +- 1/2 on K and F(ad kappa) +- 1/2 on K^perp.
/// Errors at evaluation: SingularAd, InadmissibleSpectrum.
RMatrixField reduced_canonical(std::shared_ptr<const Chain> chain, int sign, FuncalcOptions opts = {});

struct Root {
  Vec alpha_on_K;  ///< alpha(K_i) for the columns K_i of the Cartan basis
  Vec h_alpha;     ///< element of K with <h_alpha, h> = alpha(h)
  cplx norm2;      ///< |alpha|^2 = <h_alpha, h_alpha>
  Vec vec;         ///< M_alpha
  int negative = -1;  ///< index of -alpha
};

/// Root decomposition of K^perp under a Cartan subalgebra K, from eigenvectors
/// of ad of a fixed regular element. Root vectors are normalised so that
/// <M_alpha, M_-alpha> = 2/|alpha|^2.
std::vector<Root> root_data(const Chain& chain);

cplx root_value(const Root& root, const Chain& chain, const Vec& kappa);

/// +-I/2 + sum_alpha |alpha|^2/4 coth(alpha(kappa)/2) M_alpha (x) M_-alpha. OnWall at walls.
RMatrixField trig_cartan(std::shared_ptr<const Chain> cartan_chain, int sign);
/// sum_alpha |alpha|^2/(2 alpha(kappa)) M_alpha (x) M_-alpha. OnWall at walls.
RMatrixField rational_cartan(std::shared_ptr<const Chain> cartan_chain);

}  // namespace drm
