#include <gtest/gtest.h>

#include <cmath>

#include "drm/catalog.hpp"
#include "drm/elliptic.hpp"
#include "drm/error.hpp"
#include "test_util.hpp"

using namespace drm;
using test::unit;

namespace {

const cplx I1(0.0, 1.0);

cplx nome(cplx tau) { return std::exp(I1 * kPi * tau); }

// Jacobi theta constants summed directly
cplx theta2(cplx q) {
  cplx s = 0.0;
  for (int n = 0; n < 40; ++n) s += std::pow(q, (n + 0.5) * (n + 0.5));
  return 2.0 * s;
}
cplx theta3(cplx q) {
  cplx s = 1.0;
  for (int n = 1; n < 40; ++n) s += 2.0 * std::pow(q, double(n * n));
  return s;
}
cplx theta4(cplx q) {
  cplx s = 1.0;
  for (int n = 1; n < 40; ++n) s += 2.0 * (n % 2 ? -1.0 : 1.0) * std::pow(q, double(n * n));
  return s;
}

cplx f_ref(cplx w) { return 0.5 / std::tanh(w / 2.0) - 1.0 / w; }

}  // namespace

TEST(Elliptic, ThetaZeroAndParity) {
  const ThetaParams p{cplx(0.1, 0.9)};
  EXPECT_EQ(theta1(0.0, p), cplx(0.0));
  for (cplx z : {cplx(0.2, 0.1), cplx(-0.7, 0.3)}) EXPECT_LT(std::abs(theta1(-z, p) + theta1(z, p)), 1e-15);
}

TEST(Elliptic, ThetaQuasiPeriodicity) {
  for (cplx tau : {cplx(0.0, 1.0), cplx(0.3, 0.8), cplx(-0.2, 1.7)}) {
    const ThetaParams p{tau};
    for (cplx z : {cplx(0.13, 0.05), cplx(0.4, -0.2)}) {
      const cplx t = theta1(z, p);
      EXPECT_LT(std::abs(theta1(z + 1.0, p) + t), 1e-12);
      const cplx shifted = -std::exp(-I1 * kPi * tau - 2.0 * I1 * kPi * z) * t;
      EXPECT_LT(std::abs(theta1(z + tau, p) - shifted), 1e-9 * std::max(1.0, std::abs(shifted)));
    }
  }
}

TEST(Elliptic, ThetaDerivativeAtZero) {
  for (cplx tau : {cplx(0.0, 1.0), cplx(0.0, 2.5), cplx(0.25, 0.6)}) {
    const ThetaParams p{tau};
    const cplx d = theta1_prime0(p);
    const double h = 1e-5;
    EXPECT_LT(std::abs(d - (theta1(h, p) - theta1(-h, p)) / (2 * h)), 1e-8);
    const cplx q = nome(tau);
    EXPECT_LT(std::abs(d - kPi * theta2(q) * theta3(q) * theta4(q)), 1e-10);
  }
  const cplx d = theta1_prime0(ThetaParams{cplx(0.0, 1.3)});
  EXPECT_GT(d.real(), 0.0);
  EXPECT_LT(std::abs(d.imag()), 1e-14);
}

TEST(Elliptic, BadTauRejected) {
  try {
    theta1(0.1, ThetaParams{cplx(0.5, -0.1)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadTau);
  }
  EXPECT_THROW(validate(ThetaParams{cplx(1.0, 0.0)}), Error);
}

TEST(Elliptic, SimplePoleInZ) {
  const ThetaParams p{cplx(0.0, 1.0)};
  for (int a : {0, 1}) {
    const cplx w(0.3, 0.1);
    const cplx limit = 1.0 / (2.0 * kPi * I1);
    const double e4 = std::abs(1e-4 * chi(a, 2, w, 1e-4, p) - limit);
    const double e5 = std::abs(1e-5 * chi(a, 2, w, 1e-5, p) - limit);
    EXPECT_LT(e5, 1e-3) << a;
    EXPECT_NEAR(e5 / e4, 0.1, 0.02) << a;  // linear approach
  }
  EXPECT_THROW(chi(0, 1, 0.3, 0.0, p), Error);
}

TEST(Elliptic, RemovablePointOfUntwistedFunction) {
  const ThetaParams p{cplx(0.1, 1.2)};
  const cplx z(0.21, 0.07);
  const cplx at0 = chi(0, 1, 0.0, z, p);
  const cplx near = chi(0, 1, cplx(1e-4, 0.0), z, p);
  EXPECT_TRUE(std::isfinite(at0.real()));
  EXPECT_LT(std::abs(at0 - near), 1e-3);
}

TEST(Elliptic, TrigonometricLimit) {
  const ThetaParams p{cplx(0.0, 40.0)};
  for (cplx w : {cplx(0.0, 0.0), cplx(0.4, 0.0), cplx(-0.7, 0.3)}) {
    for (cplx z : {cplx(0.17, 0.05), cplx(0.31, -0.1)}) {
      const cplx expect = (std::abs(w) == 0.0 ? cplx(0.0) : f_ref(w)) - 0.5 * I1 / std::tan(kPi * z);
      EXPECT_LT(std::abs(chi(0, 1, w, z, p) - expect), 1e-8) << w << z;
    }
  }
}

TEST(Elliptic, UntwistedOperatorAtZeroOmega) {
  const auto A = test::shared(catalog("sl2"));
  const TwistedGrading g = build_twisted_grading(A, Mat::Identity(3, 3));
  const ThetaParams p{cplx(0.0, 1.0)};
  const cplx z(0.2, 0.1);
  const EllipticR r = elliptic_R(g, Vec::Zero(3), z, p);
  EXPECT_LT(max_abs(Mat(r.op - chi(0, 1, 0.0, z, p) * Mat::Identity(3, 3))), 1e-12);
  EXPECT_LT(max_abs(Mat(r.tensor - r.op * A->form_inverse())), 1e-14);
}

TEST(Elliptic, TwistedBlocks) {
  const auto A = test::shared(catalog("sl2"));
  const TwistedGrading g = build_twisted_grading(A, named_automorphism(*A, "coxeter"));
  const ThetaParams p{cplx(0.0, 1.0)};
  const cplx z(0.2, 0.1);
  const EllipticR r = elliptic_R(g, Vec::Zero(3), z, p);
  ASSERT_EQ(r.blocks.size(), 2u);
  EXPECT_LT(max_abs(Mat(r.blocks[1] - chi(1, 2, 0.0, z, p) * Mat::Identity(2, 2))), 1e-12);
  const double x = 0.3;
  const EllipticR rw = elliptic_R(g, x * unit(*A, "H"), z, p);
  EXPECT_LT(max_abs(Vec(rw.op * unit(*A, "E") - chi(1, 2, 2 * x, z, p) * unit(*A, "E"))), 1e-11);
}

TEST(Elliptic, Unitarity) {
  const auto A = test::shared(catalog("sl3"));
  const TwistedGrading g = build_twisted_grading(A, named_automorphism(*A, "coxeter"));
  const ThetaParams p{cplx(0.05, 1.1)};
  Mat S;
  const double res = unitarity_residual(g, seeded_omega(g, 7), {cplx(0.1, 0.05), cplx(0.33, -0.1), cplx(-0.27, 0.2)},
                                        p, &S);
  EXPECT_LE(res, 1e-8);
  EXPECT_LT(max_abs(Mat(S - S.transpose())), 1e-8);
}

TEST(Elliptic, LaurentModesMatchAffineBlocks) {
  const auto A = test::shared(catalog("sl2"));
  const TwistedGrading g = build_twisted_grading(A, Mat::Identity(3, 3));
  for (double x : {0.0, 0.3}) {
    AffineKappa kappa;
    kappa.omega = x * unit(*A, "H");
    kappa.k = -1.0;
    const VerificationReport rep = loop_consistency(g, kappa, {-2, -1, 0, 1, 2, 3}, 1e-6);
    EXPECT_TRUE(rep.pass) << x << " " << rep.max_residual();
  }
}

TEST(Elliptic, LaurentModesTwisted) {
  const auto A = test::shared(catalog("sl2"));
  const TwistedGrading g = build_twisted_grading(A, named_automorphism(*A, "coxeter"));
  AffineKappa kappa;
  kappa.omega = 0.2 * unit(*A, "H");
  kappa.k = -1.0;
  EXPECT_TRUE(loop_consistency(g, kappa, {-1, 0, 1, 2}, 1e-6).pass);
}

TEST(Elliptic, LaurentModesDetectWrongLevel) {
  const auto A = test::shared(catalog("sl2"));
  const TwistedGrading g = build_twisted_grading(A, Mat::Identity(3, 3));
  AffineKappa kappa;
  kappa.omega = 0.3 * unit(*A, "H");
  kappa.k = -1.0;
  AffineKappa flipped = kappa;
  flipped.k = 1.0;
  EXPECT_FALSE(loop_consistency_against(g, kappa, flipped, {1, 2}, 1e-6).pass);
  try {
    loop_consistency(g, flipped, {1}, 1e-6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadTau);
  }
}

TEST(Elliptic, SeriesTruncationIndependence) {
  const cplx z(0.2, 0.1);
  const ThetaParams a{cplx(0.0, 0.8)};
  ThetaParams b = a;
  b.series_terms = 60;
  EXPECT_LT(std::abs(theta1(z, a) - theta1(z, b)), 1e-15);
}
