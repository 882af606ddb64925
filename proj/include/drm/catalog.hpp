#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "drm/lie_algebra.hpp"

namespace drm {

struct CatalogParams {
  int n = 2;       ///< sl(n) rank+1, oscillator mode count
  int d = 2;       ///< e(d) dimension
  double p = 0.0;  ///< free parameter of the e(d) invariant form
};

/// Named algebras: "sl" (sl(n), trace form of the defining representation),
/// "e_selfdual" (self-dual extension of e(d) with generators P_i, J_ij, T_ij,
/// i<j) and "oscillator" (span{a_i, ad_i, c, N}).
/// Also accepts the shorthands "sl2", "sl3", "sl(4)", "oscillator(1)", ...
/// which override the corresponding field of `params`.
LieAlgebra catalog(std::string_view name, CatalogParams params = {});

LieAlgebra make_sl(int n);
LieAlgebra make_e_selfdual(int d, double p = 0.0);
LieAlgebra make_oscillator(int n);

/// Defining-representation matrices of the sl(n) basis in the order used by
/// make_sl: H_1..H_{n-1}, then E_ij (i<j), then E_ji (i<j).
std::vector<Mat> sl_matrix_basis(int n);

/// Coordinates of a traceless n x n matrix in the sl(n) basis.
Vec sl_coordinates(const Mat& x);

/// Resolves a subspace by name: "cartan" (labels H*), "levi" (Cartan plus
/// E12/E21 of sl(n), n >= 3), "JT" (J_ij and T_ij of e_selfdual), "Nc"
/// (N and c of the oscillator algebra), "all", or a comma-separated list of
/// basis labels.
std::vector<int> named_indices(const LieAlgebra& algebra, std::string_view name);

/// J_12 + J_34 + ... + J_{d-1,d} in e_selfdual(d), d even.
Vec e_selfdual_kappa0(const LieAlgebra& algebra, int d);

}  // namespace drm
