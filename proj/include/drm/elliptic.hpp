#pragma once

#include <vector>

#include <json.hpp>

#include "drm/affine.hpp"
#include "drm/cdybe.hpp"
#include "drm/funcalc.hpp"

namespace drm {

/// Nome q = exp(i pi tau). `series_terms` = 0 sums until the terms fall
/// below `tol` relative to the partial sum.
struct ThetaParams {
  cplx tau{0.0, 1.0};
  int series_terms = 0;
  double tol = 1e-17;
};

/// Throws BadTau unless Im tau > 0.
void validate(const ThetaParams& p);

/// theta_1(z|tau) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi z).
cplx theta1(cplx z, const ThetaParams& p);
/// d/dz theta_1 at z = 0.
cplx theta1_prime0(const ThetaParams& p);

/// chi_a(w, z|tau) = e^{2 pi i a z/N} ((1/2 pi i) theta_1(u + z) theta_1'(0) / (theta_1(z) theta_1(u)) - delta_{a0}/w)
/// with u = w/(2 pi i) + a tau/N. The removable point w = 0 of chi_0 is
/// evaluated by a mean over a small circle.
/// Errors: PoleProximity.
cplx chi(int a, int N, cplx w, cplx z, const ThetaParams& p, double margin = 1e-6);

/// Distance (in w) from w to the poles of chi_a(., z|tau).
double chi_pole_distance(int a, int N, cplx w, const ThetaParams& p);

/// chi_a(., z|tau) as a function of w.
HoloFunc chi_function(int a, int N, cplx z, const ThetaParams& p);

struct EllipticR {
  std::vector<Mat> blocks;  ///< chi_a(ad omega|G_a) in eigenbasis coordinates, a = 0..N-1
  Mat op;                   ///< operator on G
  Mat tensor;               ///< coefficient matrix op B^{-1}
};

/// R(omega, z|tau) = chi_a(ad omega, z|tau) on G_a.
/// Errors: PoleProximity (theta_1(z) = 0), InadmissibleSpectrum.
EllipticR elliptic_R(const TwistedGrading& g, const Vec& omega, cplx z, const ThetaParams& p,
                     const FuncalcOptions& opts = {});

/// |r(omega, z) + r_21(omega, -z) - S| with S the value at the first z
/// (z-independence); `constant` receives S.
double unitarity_residual(const TwistedGrading& g, const Vec& omega, const std::vector<cplx>& zs, const ThetaParams& p,
                          Mat* constant = nullptr);

/// Compares the Laurent modes (variable e^{2 pi i n z/N}, trapezoid rule on
/// `nodes` points along Im z = -Im tau/2) of the elliptic operator at
/// tau = kN/(2 pi i) with R + I/2 of the affine r-matrix: F((ad kappa)_n) + 1/2
/// for n != 0 and f(ad omega|G_0) + 1/2 for n = 0. One point per mode.
/// Errors: BadTau when Re k >= 0.
VerificationReport loop_consistency(const TwistedGrading& g, const AffineKappa& kappa, const std::vector<int>& modes,
                                    double tol, int nodes = 512, const FuncalcOptions& opts = {});

/// Same comparison against the blocks of a different affine element (used as
/// a negative control, e.g. with k replaced by -k).
VerificationReport loop_consistency_against(const TwistedGrading& g, const AffineKappa& kappa,
                                            const AffineKappa& reference, const std::vector<int>& modes, double tol,
                                            int nodes = 512, const FuncalcOptions& opts = {});

nlohmann::json elliptic_json(const TwistedGrading& g, const Vec& omega, cplx z, const ThetaParams& p,
                             const EllipticR& r);

}  // namespace drm
