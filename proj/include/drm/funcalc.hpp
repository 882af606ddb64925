#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "drm/types.hpp"

namespace drm {

enum class FuncId { f, F, Chi, Custom };

/// A scalar function holomorphic away from a discrete pole set.
///
/// `value` must return the analytic limit at removable singularities.
/// `pole_distance(z)` is the distance from z to the excluded set (infinity
/// when there is none).
struct HoloFunc {
  FuncId id = FuncId::Custom;
  std::string name;
  std::function<cplx(cplx)> value;
  std::function<double(cplx)> pole_distance;
  std::function<cplx(cplx)> derivative;  // optional

  /// f(z) = coth(z/2)/2 - 1/z, poles 2 pi i Z \ {0}.
  static HoloFunc f();
  /// F(z) = coth(z/2)/2, poles 2 pi i Z.
  static HoloFunc F();
  static HoloFunc custom(std::string name, std::function<cplx(cplx)> value,
                         std::function<double(cplx)> pole_distance = nullptr,
                         std::function<cplx(cplx)> derivative = nullptr);
};

cplx f_value(cplx z);
cplx F_value(cplx z);
cplx f_derivative(cplx z);
cplx F_derivative(cplx z);

/// Distance from z to 2 pi i Z, optionally skipping n = 0.
double distance_to_lattice(cplx z, bool skip_zero);

/// Throws PoleProximity when z is within `margin` of a pole of h.
cplx eval_scalar(const HoloFunc& h, cplx z, double margin = 1e-6);

struct SpectralReport {
  std::vector<cplx> eigenvalues;
  double min_pole_distance = std::numeric_limits<double>::infinity();
  double margin = 1e-6;
  bool admissible = true;
};

SpectralReport spectrum_check(const HoloFunc& h, const Mat& M, double margin = 1e-6);

enum class FuncalcPath { Auto, Eigen, Contour };

struct FuncalcOptions {
  double margin = 1e-6;
  double eig_cond_max = 1e7;   ///< eigenvector condition number above which the contour path is used
  double contour_tol = 1e-14;  ///< relative change between node doublings
  double contour_floor = 1e-10;  ///< accepted once refinements stop improving below this
  int max_nodes = 4096;
  FuncalcPath path = FuncalcPath::Auto;
};

/// h(M). Diagonalizable, well-conditioned inputs go through the
/// eigendecomposition; everything else through the Cauchy integral
/// (1/2 pi i) \oint h(z) (z - M)^{-1} dz, discretized by the trapezoid rule
/// on circles around eigenvalue clusters.
/// Errors: InadmissibleSpectrum, IllConditioned.
Mat holo_apply(const HoloFunc& h, const Mat& M, const FuncalcOptions& opts = {}, FuncalcPath* used = nullptr);

/// Frechet derivative d/dt h(M + tE) at t = 0 (Daleckii-Krein on the
/// eigenvalue path, block-triangular contour integral otherwise).
Mat holo_frechet(const HoloFunc& h, const Mat& M, const Mat& E, const FuncalcOptions& opts = {});

/// Power series of f, sum_k B_2k/(2k)! M^{2k-1}; valid for spectral radius
/// below 2 pi. Cross-check only.
Mat f_taylor(const Mat& M, double tol = 1e-16);

/// Divided difference [a, b]h, with a Cauchy integral when a and b are close.
cplx divided_difference(const HoloFunc& h, cplx a, cplx b);

}  // namespace drm
