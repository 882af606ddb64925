#include <gtest/gtest.h>

#include <random>

#include "drm/catalog.hpp"
#include "drm/chain.hpp"
#include "drm/cdybe.hpp"
#include "drm/error.hpp"
#include "drm/lie_algebra.hpp"
#include "test_util.hpp"

using namespace drm;
using drm::test::Sl2Data;
using drm::test::unit;

namespace {

ErrorKind build_error(const Tensor3& f, const Mat& B, std::string* detail = nullptr) {
  try {
    LieAlgebra::build(f, B, Sl2Data().labels);
  } catch (const Error& e) {
    if (detail) *detail = e.detail();
    return e.kind();
  }
  ADD_FAILURE() << "build accepted invalid data";
  return ErrorKind::Io;
}

}  // namespace

TEST(LieCore, CatalogSl2MatchesHandWrittenConstants) {
  const Sl2Data ref;
  const LieAlgebra A = catalog("sl2");
  ASSERT_EQ(A.dim(), 3);
  EXPECT_EQ(A.labels(), ref.labels);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      EXPECT_EQ(A.form()(a, b), ref.B(a, b)) << a << b;
      for (int c = 0; c < 3; ++c) EXPECT_EQ(A.f(a, b, c), ref.f(a, b, c)) << a << b << c;
    }
}

TEST(LieCore, Sl2BracketRelations) {
  const LieAlgebra A = catalog("sl2");
  const Vec H = unit(A, "H"), E = unit(A, "E"), F = unit(A, "F");
  EXPECT_LT(max_abs(A.bracket(H, E) - 2.0 * E), 1e-15);
  EXPECT_LT(max_abs(A.bracket(H, F) + 2.0 * F), 1e-15);
  EXPECT_LT(max_abs(A.bracket(E, F) - H), 1e-15);
}

TEST(LieCore, AdOfCartanIsDiagonal) {
  const LieAlgebra A = catalog("sl2");
  Mat expected = Mat::Zero(3, 3);
  expected(1, 1) = 2.0;
  expected(2, 2) = -2.0;
  EXPECT_LT(max_abs(A.ad(unit(A, "H")) - expected), 1e-15);
}

TEST(LieCore, AdMatchesBracketAndIsFormAntisymmetric) {
  std::mt19937_64 rng(11);
  for (const char* name : {"sl3", "e_selfdual(4)", "oscillator(2)"}) {
    const LieAlgebra A = catalog(name);
    const Vec x = test::random_vec(A.dim(), rng), y = test::random_vec(A.dim(), rng);
    EXPECT_LT(max_abs(A.ad(x) * y - A.bracket(x, y)), 1e-13) << name;
    EXPECT_LT(max_abs(A.bracket(x, x)), 1e-13) << name;
    const Mat adx = A.ad(x);
    EXPECT_LT(max_abs(adx.transpose() * A.form() + A.form() * adx), 1e-13) << name;
  }
}

TEST(LieCore, CatalogAlgebrasSatisfyAxioms) {
  for (const char* name : {"sl2", "sl3", "sl4", "e_selfdual(2)", "e_selfdual(3)", "e_selfdual(4)", "oscillator(1)",
                           "oscillator(2)"}) {
    const LieAlgebra A = catalog(name);
    const AxiomReport r = check_axioms(A.structure(), A.form());
    EXPECT_LE(r.antisymmetry, 1e-12) << name;
    EXPECT_LE(r.jacobi, 1e-12) << name;
    EXPECT_LE(r.invariance, 1e-12) << name;
    EXPECT_GT(r.min_singular, 1e-3) << name;
  }
}

TEST(LieCore, CatalogDimensions) {
  EXPECT_EQ(catalog("sl", {.n = 4}).dim(), 15);
  EXPECT_EQ(catalog("e_selfdual", {.d = 2}).dim(), 4);
  EXPECT_EQ(catalog("e_selfdual", {.d = 3}).dim(), 9);
  EXPECT_EQ(catalog("e_selfdual", {.d = 5}).dim(), 25);
  EXPECT_EQ(catalog("oscillator", {.n = 3}).dim(), 8);
  EXPECT_THROW(catalog("so7"), Error);
}

TEST(LieCore, SelfDualEuclideanRelations) {
  const LieAlgebra A = catalog("e_selfdual", {.d = 2});
  EXPECT_LT(max_abs(A.bracket(unit(A, "P1"), unit(A, "P2")) - unit(A, "T12")), 1e-15);
  EXPECT_LT(max_abs(A.bracket(unit(A, "P1"), unit(A, "J12")) - unit(A, "P2")), 1e-15);
  EXPECT_LT(max_abs(A.bracket(unit(A, "J12"), unit(A, "T12"))), 1e-15);
  EXPECT_EQ(A.pairing(unit(A, "P1"), unit(A, "P1")), cplx(1.0));
}

TEST(LieCore, OscillatorRelations) {
  const LieAlgebra A = catalog("oscillator(1)");
  const Vec a = unit(A, "a1"), ad = unit(A, "ad1"), c = unit(A, "c"), N = unit(A, "N");
  EXPECT_LT(max_abs(A.bracket(a, ad) - c), 1e-15);
  EXPECT_LT(max_abs(A.bracket(N, a) + a), 1e-15);
  EXPECT_LT(max_abs(A.bracket(N, ad) - ad), 1e-15);
  EXPECT_LT(max_abs(A.ad(c)), 1e-15);
  EXPECT_EQ(A.pairing(c, N), cplx(1.0));
}

TEST(LieCore, ZeroFormIsDegenerate) {
  const Sl2Data d;
  EXPECT_EQ(build_error(d.f, Mat::Zero(3, 3)), ErrorKind::DegenerateForm);
}

TEST(LieCore, AntisymmetryViolationDetected) {
  Sl2Data d;
  d.f(1, 0, 1) = 2.0;  // now [E,H] = [H,E]
  std::string detail;
  EXPECT_EQ(build_error(d.f, d.B, &detail), ErrorKind::AntisymmetryViolation);
  EXPECT_NE(detail.find("E"), std::string::npos) << detail;
}

TEST(LieCore, BrokenJacobiNamesTriple) {
  // [E,F] = H + E keeps antisymmetry but breaks Jacobi
  Sl2Data d;
  d.f(1, 2, 1) = 1.0;
  d.f(2, 1, 1) = -1.0;
  const AxiomReport r = check_axioms(d.f, d.B);
  EXPECT_GT(r.jacobi, 0.5);
  std::string detail;
  EXPECT_EQ(build_error(d.f, d.B, &detail), ErrorKind::JacobiViolation);
  EXPECT_NE(detail.find("("), std::string::npos) << detail;
}

TEST(LieCore, NonInvariantFormDetected) {
  Sl2Data d;
  d.B(0, 0) = 3.0;
  EXPECT_EQ(build_error(d.f, d.B), ErrorKind::InvarianceViolation);
}

TEST(LieCore, DualBasisOfRootPair) {
  const LieAlgebra A = catalog("sl2");
  const Mat EF = coordinate_subspace(3, {1, 2});
  const Mat dual = dual_basis(A, EF);
  EXPECT_LT(max_abs(dual.col(0) - unit(A, "F")), 1e-15);
  EXPECT_LT(max_abs(dual.col(1) - unit(A, "E")), 1e-15);
  const Mat Hd = dual_basis(A, coordinate_subspace(3, {0}));
  EXPECT_LT(max_abs(Hd.col(0) - 0.5 * unit(A, "H")), 1e-15);
  EXPECT_LT(max_abs(Mat(A.gram(EF).transpose() - A.gram(EF))), 1e-15);
}

TEST(LieCore, DualBasisPairsToIdentity) {
  std::mt19937_64 rng(3);
  const LieAlgebra A = catalog("sl3");
  Mat V(8, 3);
  for (int j = 0; j < 3; ++j) V.col(j) = test::random_vec(8, rng);
  const Mat D = dual_basis(A, V);
  EXPECT_LT(max_abs(Mat(V.transpose() * A.form() * D) - Mat::Identity(3, 3)), 1e-10);
}

TEST(LieCore, IsotropicSubspaceHasNoDualBasis) {
  const LieAlgebra A = catalog("sl2");
  try {
    dual_basis(A, coordinate_subspace(3, {1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateRestriction);
  }
}

TEST(LieCore, CartanChainOfSl2) {
  const auto A = test::shared(catalog("sl2"));
  const Chain ch = make_chain(A, std::vector<int>{0});
  ASSERT_EQ(ch.nK(), 1);
  ASSERT_EQ(ch.nM(), 2);
  EXPECT_TRUE(ch.orthogonal());
  EXPECT_LT(max_abs(ch.P_M() * unit(*A, "E") - unit(*A, "E")), 1e-14);
  EXPECT_LT(max_abs(ch.P_M() * unit(*A, "F") - unit(*A, "F")), 1e-14);
  EXPECT_LT(max_abs(ch.P_M() * unit(*A, "H")), 1e-14);
  EXPECT_LT(max_abs(Mat(ch.P_K() + ch.P_M() + ch.P_L_perp()) - Mat::Identity(3, 3)), 1e-14);
  EXPECT_LE(ch.invariant_residual(), 1e-12);
}

TEST(LieCore, SelfDualEuclideanChainComplementIsTranslations) {
  for (int d : {2, 3, 4}) {
    const auto A = test::shared(catalog("e_selfdual", {.d = d}));
    const Chain ch = make_chain(A, named_indices(*A, "JT"));
    EXPECT_EQ(ch.nM(), d);
    for (int i = 1; i <= d; ++i) {
      const Vec P = unit(*A, "P" + std::to_string(i));
      EXPECT_LT(max_abs(ch.P_M() * P - P), 1e-13) << d;
    }
  }
}

TEST(LieCore, LeviChainInsideSl3) {
  const auto A = test::shared(catalog("sl3"));
  const Chain ch = make_chain(A, named_indices(*A, "cartan"), named_indices(*A, "levi"));
  EXPECT_EQ(ch.nK(), 2);
  EXPECT_EQ(ch.nM(), 2);
  EXPECT_EQ(ch.L_perp().cols(), 4);
  // ad K preserves M
  for (int i = 0; i < ch.nK(); ++i) {
    const Mat adk = A->ad(ch.K().col(i));
    EXPECT_LT(max_abs(Mat((Mat::Identity(8, 8) - ch.P_M()) * adk * ch.M())), 1e-13);
  }
}

TEST(LieCore, ChainRejectsBadSubspaces) {
  const auto A = test::shared(catalog("sl2"));
  auto kind_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind_of([&] { make_chain(A, std::vector<int>{1}); }), ErrorKind::DegenerateRestriction);

  const auto A3 = test::shared(catalog("sl3"));
  EXPECT_EQ(kind_of([&] { make_chain(A3, named_indices(*A3, "E12,E21")); }), ErrorKind::NotSubalgebra);

  Mat M(3, 2);
  M.col(0) = unit(*A, "E") + 0.5 * unit(*A, "H");
  M.col(1) = unit(*A, "F");
  EXPECT_EQ(kind_of([&] { make_chain(A, coordinate_subspace(3, {0}), Mat::Identity(3, 3), M); }),
            ErrorKind::ComplementNotInvariant);
}

TEST(LieCore, ExplicitComplementEqualToOrthogonalOne) {
  const auto A = test::shared(catalog("sl2"));
  const Chain ch = make_chain(A, coordinate_subspace(3, {0}), Mat::Identity(3, 3), coordinate_subspace(3, {1, 2}));
  EXPECT_FALSE(ch.orthogonal());  // explicit mode
  const Vec kappa = 0.4 * unit(*A, "H");
  EXPECT_LT(max_abs(ch.lift(kappa) - kappa), 1e-14);
}

TEST(LieCore, CanonicalIdentityTensorOfSl2) {
  const LieAlgebra A = catalog("sl2");
  const CanonicalTensors t = canonical_tensors(A);
  EXPECT_NEAR(t.identity(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(t.identity(1, 2).real(), 1.0, 1e-15);
  EXPECT_NEAR(t.identity(2, 1).real(), 1.0, 1e-15);
  EXPECT_LT(max_abs(Mat(t.identity * A.form()) - Mat::Identity(3, 3)), 1e-15);
}

TEST(LieCore, CanonicalTensorsAreInvariant) {
  for (const char* name : {"sl2", "sl3", "e_selfdual(3)", "oscillator(1)"}) {
    const LieAlgebra A = catalog(name);
    const CanonicalTensors t = canonical_tensors(A);
    EXPECT_LE(invariance_residual(A, t.identity), 1e-12) << name;
    EXPECT_LE(invariance_residual(A, t.bracket), 1e-12) << name;
    EXPECT_LE(antisymmetry_residual(t.bracket), 1e-12) << name;
  }
}

TEST(LieCore, AbelianAlgebraHasZeroBracketTensor) {
  Mat B = Mat::Identity(2, 2);
  const LieAlgebra A = LieAlgebra::build(Tensor3(2), B, {"x", "y"});
  EXPECT_EQ(canonical_tensors(A).bracket.max_abs(), 0.0);
}
