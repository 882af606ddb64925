#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "drm/chain.hpp"
#include "drm/drmatrix.hpp"
#include "drm/tensor3.hpp"

namespace drm {

enum class Kernel { Serial, Parallel };

/// Bracket part [r12,r13] + [r12,r23] + [r13,r23] of the CDYB tensor.
/// The serial version is the plain index-loop reference; the parallel one
/// contracts through per-slot matrix products under OpenMP.
Tensor3 cyb_brackets_serial(const LieAlgebra& A, const Mat& r);
Tensor3 cyb_brackets_parallel(const LieAlgebra& A, const Mat& r);
Tensor3 cyb_brackets(const LieAlgebra& A, const Mat& r, Kernel kernel = Kernel::Parallel);

/// sum_i K_i^(1) dr_i^(23) - dr_i^(13) K_i^(2) + dr_i^(12) K_i^(3), where
/// dr_i is the derivative of r along the i-th dual basis vector of K.
Tensor3 derivative_terms(const Mat& K, const std::vector<Mat>& dr);

/// The classical dynamical Yang-Baxter tensor of r at kappa.
Tensor3 cdyb(const RMatrixField& r, const Vec& kappa, DerivMode mode = DerivMode::Auto,
             Kernel kernel = Kernel::Parallel);

/// Max over the basis x of |(ad x (x) 1 (x) 1 + 1 (x) ad x (x) 1 + 1 (x) 1 (x) ad x) T|.
double invariance_residual(const LieAlgebra& A, const Tensor3& T);
double invariance_residual(const LieAlgebra& A, const Mat& r);

/// Max over a of |(ad L_a (x) 1 + 1 (x) ad L_a) r(kappa) - d/dt r(kappa + t[L_a, kappa])|.
double equivariance_residual(const RMatrixField& r, const Vec& kappa, DerivMode mode = DerivMode::Auto);

/// Max over slot transpositions of |T + T_swapped|.
double antisymmetry_residual(const Tensor3& T);

struct SamplePoint {
  int index = 0;
  Vec kappa;
  double residual = 0.0;
};

struct VerificationReport {
  std::string check;
  std::string algebra;
  std::string chain;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::vector<SamplePoint> points;
  nlohmann::json meta = nlohmann::json::object();
  bool pass = false;

  double max_residual() const;
  /// pass = every residual <= tol (and at least one point).
  void finalize();
};

nlohmann::json to_json(const VerificationReport& report);
nlohmann::json complex_vector_json(const Vec& v);

struct SamplingSpec {
  Vec center;             ///< regular point inside the dynamical subalgebra
  double radius = 0.1;    ///< half-width of the box in dynamical coordinates
  int count = 5;
  std::uint64_t seed = 7;
  int max_attempts = 200;
};

/// Seeded kappa = center + radius * sum_i u_i K_i, u_i uniform in [-1, 1],
/// kept when r is defined there. Throws NoAdmissibleSamples when none is found.
std::vector<Vec> sample_points(const RMatrixField& r, const SamplingSpec& spec);

/// Evaluates residual(kappa_i) for each sample point in parallel; ordering is
/// by sample index, independent of scheduling.
VerificationReport run_samples(const std::string& check, const std::vector<Vec>& points, double tol,
                               const std::function<double(const Vec&)>& residual);

VerificationReport check_equivariance(const RMatrixField& r, const std::vector<Vec>& points, double tol,
                                      DerivMode mode = DerivMode::Auto);

VerificationReport check_invariant_constant(const LieAlgebra& A, const Tensor3& T, double tol);
VerificationReport check_invariant_constant(const LieAlgebra& A, const Mat& r, double tol);

/// CDYB(r) at every point must be ad-invariant and equal to its value at the
/// first point.
struct CdybSuite {
  VerificationReport invariance;
  VerificationReport constancy;
  Tensor3 value;  ///< CDYB(r) at the first sample
};
CdybSuite cdyb_suite(const RMatrixField& r, const std::vector<Vec>& points, double tol, DerivMode mode = DerivMode::Auto);

struct Prop1Result {
  VerificationReport dirac_zero;  ///< |CDYB(D)|
  VerificationReport equality;    ///< |CDYB(r*) - CDYB(r)|
  VerificationReport constancy;   ///< |CDYB(r)(kappa_i) - CDYB(r)(kappa_0)|
  bool pass() const { return dirac_zero.pass && equality.pass && constancy.pass; }
};

/// Checks CDYB(D) = 0, CDYB(r*) = CDYB(r) and constancy of CDYB(r) on the
/// sample points (elements of K).
Prop1Result proposition1_suite(const RMatrixField& r, std::shared_ptr<const Chain> chain, const std::vector<Vec>& points,
                               double tol, DerivMode mode = DerivMode::Auto);

/// |CDYB(r^a + r^s) - CDYB(r^a) - [r^s_12, r^s_13]| at kappa.
double split_identity_check(const RMatrixField& r_antisym, const Mat& r_sym, const Vec& kappa,
                            DerivMode mode = DerivMode::Auto);

/// [a_12, a_13] for a constant coefficient matrix a.
Tensor3 bracket_12_13(const LieAlgebra& A, const Mat& a);

/// Residual vector of the operator form of the CDYBE for an antisymmetric
/// field R over K (chain K in A, M = K^perp):
/// [RX,RY] - R([X,RY] + [RX,Y]) + sum_i K^i <X, (d_{K_i} R) Y>
///   + (d_{Y_K} R) X - (d_{X_K} R) Y + C^2 [X,Y].
Vec operator_cdybe_residual(const RMatrixField& r, const Chain& chain, const Vec& kappa, cplx C, const Vec& X,
                            const Vec& Y, DerivMode mode = DerivMode::Auto);

}  // namespace drm
