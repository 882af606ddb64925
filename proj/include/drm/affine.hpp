#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "drm/cdybe.hpp"
#include "drm/funcalc.hpp"
#include "drm/lie_algebra.hpp"

namespace drm {

/// Eigenspace decomposition G = sum_a G_a of a finite-order isometric
/// automorphism mu, with mu = exp(2 pi i a / N) on G_a.
class TwistedGrading {
 public:
  const LieAlgebra& algebra() const { return *G_; }
  std::shared_ptr<const LieAlgebra> algebra_ptr() const { return G_; }
  const Mat& mu() const { return mu_; }
  int order() const { return N_; }

  /// Residue class of grade n in [0, N).
  int residue(int n) const { return ((n % N_) + N_) % N_; }
  const Mat& eigenbasis(int a) const { return basis_[static_cast<std::size_t>(a)]; }
  const Mat& projection(int a) const { return proj_[static_cast<std::size_t>(a)]; }
  /// Coordinates of x in G_a with respect to eigenbasis(a).
  Vec coordinates(int a, const Vec& x) const { return coord_[static_cast<std::size_t>(a)] * x; }
  /// Left inverse of eigenbasis(a) composed with the projection onto G_a.
  const Mat& coordinate_map(int a) const { return coord_[static_cast<std::size_t>(a)]; }
  int eigenspace_dim(int a) const { return static_cast<int>(basis_[static_cast<std::size_t>(a)].cols()); }

  /// Largest |<G_a, G_b>| with a + b != 0 mod N.
  double orthogonality_residual() const;

  friend TwistedGrading build_twisted_grading(std::shared_ptr<const LieAlgebra>, const Mat&, double, int);

 private:
  std::shared_ptr<const LieAlgebra> G_;
  Mat mu_;
  int N_ = 1;
  std::vector<Mat> basis_, proj_, coord_;
};

/// Errors: NotAutomorphism, NotIsometry, WrongOrder (no N <= max_order with
/// mu^N = 1), NoFixedPoints.
TwistedGrading build_twisted_grading(std::shared_ptr<const LieAlgebra> G, const Mat& mu, double tol = 1e-10,
                                     int max_order = 64);

/// Ad(diag(h)) on sl(n) in the catalog basis.
Mat sl_diagonal_automorphism(const LieAlgebra& sl, const std::vector<cplx>& h);
/// "id" / "identity", or "coxeter" (sl(n) only: Ad(diag(1, z, ..., z^{n-1})), z = e^{2 pi i/n}).
Mat named_automorphism(const LieAlgebra& G, const std::string& name);

/// Element of A(G, mu): finitely many homogeneous loop terms xi^n plus
/// multiples of the central element c and the derivation d.
struct AffineElement {
  std::map<int, Vec> loop;
  cplx c{};
  cplx d{};

  AffineElement& operator+=(const AffineElement& o);
  AffineElement& operator*=(cplx s);
  friend AffineElement operator+(AffineElement a, const AffineElement& b) { return a += b; }
  friend AffineElement operator-(AffineElement a, const AffineElement& b) { return a += (b * cplx{-1.0}); }
  friend AffineElement operator*(AffineElement a, cplx s) { return a *= s; }
  friend AffineElement operator*(cplx s, AffineElement a) { return a *= s; }

  double max_abs() const;
};

/// Throws GradeMismatch when some xi^n does not lie in G_{n mod N}.
void validate(const TwistedGrading& g, const AffineElement& x);

/// [xi^n, eta^p] = [xi,eta]^{n+p} + n delta_{n,-p} B(xi,eta) c, [d, xi^n] = n xi^n, c central.
AffineElement affine_bracket(const TwistedGrading& g, const AffineElement& x, const AffineElement& y);

/// <xi^n, eta^p> = delta_{n,-p} B(xi,eta), <c,d> = 1.
cplx affine_form(const TwistedGrading& g, const AffineElement& x, const AffineElement& y);

/// kappa = omega + k d + l c with omega in G_0.
struct AffineKappa {
  Vec omega;
  cplx k{-1.0, 0.0};
  cplx l{};
};

AffineElement to_element(const AffineKappa& kappa);

/// scale * sum_j u_j g_j over the eigenbasis g_j of G_0, u_j uniform in
/// [-1, 1] from mt19937_64(seed).
Vec seeded_omega(const TwistedGrading& g, std::uint64_t seed, double scale = 0.3);

/// Homogeneous component A_n. For n != 0 this is G_{n mod N} (x) lambda^n with
/// coordinates over eigenbasis(n mod N); A_0 = G_0 + Cd + Cc with the d and c
/// coordinates appended last.
int block_dim(const TwistedGrading& g, int n);
AffineElement block_element(const TwistedGrading& g, int n, const Vec& coords);
/// Component of x in A_n, in block coordinates.
Vec block_coords(const TwistedGrading& g, int n, const AffineElement& x);

/// Matrix of ad kappa on A_n.
Mat ad_kappa_block(const TwistedGrading& g, const AffineKappa& kappa, int n);
/// Matrix of ad T on A_n for T in A_0 (the direction of a derivative).
Mat ad_direction_block(const TwistedGrading& g, const AffineElement& T, int n);

/// f((ad kappa)_0) on A_0, F((ad kappa)_n) on A_n otherwise.
Mat affine_R_block(const TwistedGrading& g, const AffineKappa& kappa, int n, const FuncalcOptions& opts = {});
/// d/dt of the block at kappa + tT, T in A_0.
Mat affine_R_block_derivative(const TwistedGrading& g, const AffineKappa& kappa, const AffineElement& T, int n,
                              const FuncalcOptions& opts = {});

/// Gram matrix <A_n basis, A_{-n} basis>.
Mat block_pairing(const TwistedGrading& g, int n);

struct AffineDomainReport {
  int window = 0;
  std::map<int, double> block_distance;  ///< per grade, distance of the spectrum to the pole set
  double min_distance = 0.0;
  bool window_admissible = false;
  bool all_grades_certified = false;  ///< analytic certificate for every n
  double all_grades_distance = 0.0;
  std::string note;
  bool admissible() const { return window_admissible; }
};

/// Windowed spectral check plus the integer-collision analysis
/// k n + lambda_j(omega) in 2 pi i Z over all n (needs Re k != 0).
AffineDomainReport domain_check(const TwistedGrading& g, const AffineKappa& kappa, int window, double margin = 1e-6);

/// Operator CDYBE with C = 1/2 on random homogeneous pairs X in A_m, Y in A_n,
/// |m|, |n|, |m + n| <= window, with exact (Frechet) derivatives. The residual
/// per pair is the max entry of the left side.
VerificationReport verify_prop2(const TwistedGrading& g, const AffineKappa& kappa, int window, int pairs,
                                std::uint64_t seed, double tol, const FuncalcOptions& opts = {});

/// Left side of the operator CDYBE for one homogeneous pair.
AffineElement prop2_residual(const TwistedGrading& g, const AffineKappa& kappa, const AffineElement& X,
                             const AffineElement& Y, cplx C, const FuncalcOptions& opts = {});

nlohmann::json grading_json(const TwistedGrading& g, const std::string& name);

}  // namespace drm
