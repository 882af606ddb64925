// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "drm/affine.hpp"
#include "drm/catalog.hpp"
#include "drm/cdybe.hpp"
#include "drm/cli.hpp"
#include "drm/drmatrix.hpp"
#include "drm/elliptic.hpp"
#include "drm/error.hpp"
#include "drm/io.hpp"

using namespace drm;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [failed]");
  }
  void bound(const std::string& what, double value, double tol) {
    std::ostringstream s;
    s << what << " " << value << " <= " << tol;
    require(value <= tol, s.str());
  }
};

struct Criterion {
  int id;
  std::string title;
  double limit_s;  // 0: no limit
  std::function<void(Outcome&)> body;
};

std::shared_ptr<const LieAlgebra> shared(LieAlgebra A) { return std::make_shared<const LieAlgebra>(std::move(A)); }

std::shared_ptr<const Chain> chain(const std::shared_ptr<const LieAlgebra>& A, const std::string& K,
                                   const std::string& L = "all") {
  return std::make_shared<const Chain>(
      make_chain(A, named_indices(*A, K), L == "all" ? std::vector<int>{} : named_indices(*A, L)));
}

Vec sl_center(int n) {
  Mat d = Mat::Zero(n, n);
  double mean = 0.0;
  for (int j = 0; j < n; ++j) mean += double(j * j) / n;
  for (int j = 0; j < n; ++j) d(j, j) = 0.5 * ((n - 1) / 2.0 - j) + 0.04 * (j * j - mean);
  return sl_coordinates(d);
}

Vec label(const LieAlgebra& A, const std::string& l) { return A.basis_vector(*A.index_of(l)); }

std::vector<Vec> samples(const RMatrixField& r, const Vec& center) {
  SamplingSpec spec;
  spec.center = center;
  spec.radius = 0.05;
  spec.count = 5;
  spec.seed = 7;
  return sample_points(r, spec);
}

// 1
void catalog_axioms(Outcome& o) {
  double worst = 0.0;
  bool nondegenerate = true;
  for (const char* name : {"sl2", "sl3", "e_selfdual(2)", "e_selfdual(4)", "oscillator(1)"}) {
    const LieAlgebra A = catalog(name);
    const AxiomReport r = check_axioms(A.structure(), A.form());
    worst = std::max({worst, r.antisymmetry, r.jacobi, r.invariance});
    nondegenerate = nondegenerate && r.min_singular > 1e-12 * std::max(1.0, r.max_singular);
  }
  o.bound("max axiom residual", worst, 1e-12);
  o.require(nondegenerate, "forms nondegenerate");
}

// 2
void canonical_cdybe(Outcome& o) {
  double fd = 0.0, exact = 0.0;
  for (int n : {2, 3}) {
    const auto A = shared(catalog("sl", {.n = n}));
    for (int s : {1, -1}) {
      const RMatrixField rho = canonical_r(A, s);
      const auto pts = samples(rho, sl_center(n));
      const CdybSuite a = cdyb_suite(rho, pts, 1e-6, DerivMode::FiniteDifference);
      const CdybSuite b = cdyb_suite(rho, pts, 1e-8, DerivMode::Exact);
      fd = std::max({fd, a.invariance.max_residual(), a.constancy.max_residual()});
      exact = std::max({exact, b.invariance.max_residual(), b.constancy.max_residual()});
      o.require(pts.size() == 5, "5 points");
    }
  }
  o.bound("fd", fd, 1e-6);
  o.bound("exact", exact, 1e-8);
}

// 3
void dirac_reduction(Outcome& o) {
  auto run = [&](const std::string& what, const RMatrixField& r, const std::shared_ptr<const Chain>& ch,
                 const Vec& center) {
    const auto pts = samples(reduce(r, ch), center);
    const Prop1Result res = proposition1_suite(r, ch, pts, 1e-8, DerivMode::Exact);
    o.bound(what, std::max({res.dirac_zero.max_residual(), res.equality.max_residual()}), 1e-8);
    return pts;
  };
  const auto sl2 = shared(catalog("sl2"));
  run("sl2 cartan", canonical_r(sl2, 1), chain(sl2, "cartan"), sl_center(2));

  const auto sl3 = shared(catalog("sl3"));
  const RMatrixField rho = canonical_r(sl3, 1);
  run("sl3 cartan", rho, chain(sl3, "cartan"), sl_center(3));

  const RMatrixField levi_field = reduce(rho, chain(sl3, "levi"));
  const auto pts = run("sl3 cartan<levi", levi_field, chain(sl3, "cartan", "levi"), sl_center(3));
  const RMatrixField two = reduce(levi_field, chain(sl3, "cartan", "levi"));
  const RMatrixField one = reduce(rho, chain(sl3, "cartan"));
  double comp = 0.0;
  for (const Vec& k : pts) comp = std::max(comp, max_abs(Mat(two.eval(k) - one.eval(k))));
  o.bound("two-step composition", comp, 1e-9);

  const auto e4 = shared(catalog("e_selfdual(4)"));
  run("e_selfdual(4) JT", canonical_r(e4, 1), chain(e4, "JT"), 0.1 * e_selfdual_kappa0(*e4, 4));

  const auto osc = shared(catalog("oscillator(1)"));
  run("oscillator(1) Nc", canonical_r(osc, 1), chain(osc, "Nc"), 0.3 * label(*osc, "N") + 0.2 * label(*osc, "c"));
}

// 4
void closed_forms(Outcome& o) {
  double trig = 0.0, rat = 0.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int n : {2, 3}) {
    const auto A = shared(catalog("sl", {.n = n}));
    const auto ch = chain(A, "cartan");
    const RMatrixField zero = zero_field(A, Mat::Identity(A->dim(), A->dim()));
    for (int t = 0; t < 5; ++t) {
      Vec kappa = sl_center(n);
      for (int i = 0; i < ch->nK(); ++i) kappa += u(rng) * ch->K().col(i);
      for (int s : {1, -1})
        trig = std::max(trig, max_abs(Mat(trig_cartan(ch, s).eval(kappa) - reduced_canonical(ch, s).eval(kappa))));
      rat = std::max(rat, max_abs(Mat(rational_cartan(ch).eval(kappa) - reduce(zero, ch).eval(kappa))));
    }
  }
  o.bound("trig vs reduced canonical", trig, 1e-10);
  o.bound("rational vs reduced zero", rat, 1e-10);
}

// 5
void euclidean_dichotomy(Outcome& o) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d : {3, 5}) {
    const auto A = shared(catalog("e_selfdual", {.d = d}));
    const auto ch = chain(A, "JT");
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      Vec kappa = Vec::Zero(A->dim());
      for (int i = 0; i < ch->nK(); ++i) kappa += u(rng) * ch->K().col(i);
      const Eigen::VectorXd sv = c_matrix(*ch, kappa).jacobiSvd().singularValues();
      worst = std::max(worst, sv.minCoeff() / std::max(1.0, sv.maxCoeff()));
    }
    o.bound("d=" + std::to_string(d) + " worst relative min singular", worst, 1e-12);
  }
  for (int d : {2, 4}) {
    const auto A = shared(catalog("e_selfdual", {.d = d}));
    const auto ch = chain(A, "JT");
    const Eigen::VectorXd sv = c_matrix(*ch, 0.1 * e_selfdual_kappa0(*A, d)).jacobiSvd().singularValues();
    const double rel = sv.minCoeff() / std::max(1.0, sv.maxCoeff());
    std::ostringstream s;
    s << "d=" << d << " relative min singular " << rel << " > 1e-8";
    o.require(rel > 1e-8, s.str());
    bool ok = true;
    try {
      dirac_D(*ch, 0.1 * e_selfdual_kappa0(*A, d));
    } catch (const Error&) {
      ok = false;
    }
    o.require(ok, "d=" + std::to_string(d) + " D defined");
  }
}

// 6
void loop_equation(Outcome& o) {
  struct Case {
    const char* algebra;
    const char* mu;
  };
  for (const Case& c : {Case{"sl2", "id"}, Case{"sl2", "coxeter"}, Case{"e_selfdual(2)", "id"}}) {
    const auto A = shared(catalog(c.algebra));
    const TwistedGrading g = build_twisted_grading(A, named_automorphism(*A, c.mu));
    AffineKappa kappa;
    kappa.omega = seeded_omega(g, 7);
    kappa.k = -1.0;
    kappa.l = 0.0;
    const VerificationReport rep = verify_prop2(g, kappa, 3, 50, 7, 1e-8);
    o.require(rep.points.size() >= 50, "50 pairs");
    o.bound(std::string(c.algebra) + "/" + c.mu, rep.max_residual(), 1e-8);
  }
}

// 7
void theta_layer(Outcome& o) {
  const cplx I1(0.0, 1.0);
  double quasi = 0.0;
  for (cplx tau : {cplx(0.0, 1.0), cplx(0.3, 0.8), cplx(-0.2, 1.7)}) {
    const ThetaParams p{tau};
    for (cplx z : {cplx(0.13, 0.05), cplx(0.4, -0.2), cplx(-0.31, 0.11)}) {
      const cplx t = theta1(z, p);
      quasi = std::max(quasi, std::abs(theta1(z + 1.0, p) + t));
      const cplx shifted = -std::exp(-I1 * kPi * tau - 2.0 * I1 * kPi * z) * t;
      quasi = std::max(quasi, std::abs(theta1(z + tau, p) - shifted) / std::max(1.0, std::abs(shifted)));
    }
  }
  o.bound("quasi-periodicity", quasi, 1e-9);

  double trig = 0.0;
  const ThetaParams p40{cplx(0.0, 40.0)};
  for (cplx w : {cplx(0.0), cplx(0.4, 0.0), cplx(-0.7, 0.3), cplx(1.5, -0.2)})
    for (cplx z : {cplx(0.17, 0.05), cplx(0.31, -0.1)}) {
      const cplx fw = std::abs(w) == 0.0 ? cplx(0.0) : 0.5 / std::tanh(w / 2.0) - 1.0 / w;
      trig = std::max(trig, std::abs(chi(0, 1, w, z, p40) - (fw - 0.5 * I1 / std::tan(kPi * z))));
    }
  o.bound("trigonometric degeneration", trig, 1e-8);

  const auto A = shared(catalog("sl2"));
  const TwistedGrading g = build_twisted_grading(A, Mat::Identity(3, 3));
  for (double x : {0.0, 0.3}) {
    AffineKappa kappa;
    kappa.omega = x * label(*A, "H");
    kappa.k = -1.0;
    const VerificationReport rep = loop_consistency(g, kappa, {-3, -2, -1, 0, 1, 2, 3}, 1e-6);
    o.bound("modes omega=" + std::to_string(x).substr(0, 3) + "H", rep.max_residual(), 1e-6);
  }
}

// 8
void negative_controls(Outcome& o) {
  Tensor3 f(3);
  f(0, 1, 1) = 2.0;
  f(1, 0, 1) = -2.0;
  f(0, 2, 2) = -2.0;
  f(2, 0, 2) = 2.0;
  f(1, 2, 0) = 1.0;
  f(2, 1, 0) = -1.0;
  f(1, 2, 1) = 1.0;  // [E,F] = H + E
  f(2, 1, 1) = -1.0;
  Mat B = Mat::Zero(3, 3);
  B(0, 0) = 2.0;
  B(1, 2) = B(2, 1) = 1.0;
  bool rejected = false;
  try {
    LieAlgebra::build(f, B, {"H", "E", "F"});
  } catch (const Error& e) {
    rejected = e.kind() == ErrorKind::JacobiViolation;
  }
  o.require(rejected, "broken Jacobi rejected");

  const auto A = shared(catalog("sl3"));
  const auto ch = chain(A, "cartan");
  const RMatrixField zero = zero_field(A, ch->K());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    Vec X(8), Y(8);
    for (int i = 0; i < 8; ++i) {
      X(i) = cplx(u(rng), u(rng));
      Y(i) = cplx(u(rng), u(rng));
    }
    const Vec res = operator_cdybe_residual(zero, *ch, sl_center(3), 0.5, X, Y);
    const Vec br = A->bracket(X, Y);
    worst = std::max(worst, std::abs(res.norm() - 0.25 * br.norm()) / br.norm());
  }
  o.bound("R=0 residual vs |[X,Y]|/4 (relative)", worst, 1e-15);

  const char* argv[] = {"drmat", "--tol", "1e-15", "verify", "all", "--G", "sl2"};
  std::ostringstream out, err;
  const int code = run_cli(7, argv, out, err);
  o.require(code == kExitVerifyFail, "tolerance 1e-15 run exits " + std::to_string(code));
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "catalog axioms", 1.0, catalog_axioms},
      {2, "canonical r-matrix CDYBE", 10.0, canonical_cdybe},
      {3, "Dirac reduction preserves CDYB", 30.0, dirac_reduction},
      {4, "closed-form equivalences", 5.0, closed_forms},
      {5, "e(d) parity dichotomy", 5.0, euclidean_dichotomy},
      {6, "twisted loop operator CDYBE", 60.0, loop_equation},
      {7, "theta layer", 60.0, theta_layer},
      {8, "negative controls", 0.0, negative_controls},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream rt;
    rt << "runtime " << secs << " s";
    if (c.limit_s > 0.0) rt << " < " << c.limit_s << " s";
    o.require(c.limit_s <= 0.0 || secs < c.limit_s, rt.str());
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
