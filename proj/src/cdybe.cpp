#include "drm/cdybe.hpp"

#include <algorithm>
#include <exception>
#include <random>

#include "drm/error.hpp"

namespace drm {

namespace {

// Runs fn(i) for i in [0, n) under OpenMP and rethrows the lowest-index
// exception afterwards, so failures do not depend on scheduling.
template <typename T, typename Fn>
std::vector<T> parallel_map(int n, Fn fn) {
  std::vector<T> out(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// (F_e)_{bc} = f(b, c, e)
std::vector<Mat> slot_matrices(const LieAlgebra& A) {
  const int n = A.dim();
  std::vector<Mat> F(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < n; ++c) {
      for (int e = 0; e < n; ++e) F[static_cast<std::size_t>(e)](b, c) = A.f(b, c, e);
    }
  }
  return F;
}

}  // namespace

Tensor3 cyb_brackets_serial(const LieAlgebra& A, const Mat& r) {
  const int n = A.dim();
  Tensor3 out(n);
  // [r12, r13]: r^{ab} r^{cd} [T_a, T_c] (x) T_b (x) T_d
  for (int e = 0; e < n; ++e)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) {
        cplx s{};
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c) s += A.f(a, c, e) * r(a, b) * r(c, d);
        out(e, b, d) += s;
      }
  // [r12, r23]: r^{ab} r^{cd} T_a (x) [T_b, T_c] (x) T_d
  for (int a = 0; a < n; ++a)
    for (int e = 0; e < n; ++e)
      for (int d = 0; d < n; ++d) {
        cplx s{};
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) s += r(a, b) * A.f(b, c, e) * r(c, d);
        out(a, e, d) += s;
      }
  // [r13, r23]: r^{ab} r^{cd} T_a (x) T_c (x) [T_b, T_d]
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      for (int e = 0; e < n; ++e) {
        cplx s{};
        for (int b = 0; b < n; ++b)
          for (int d = 0; d < n; ++d) s += r(a, b) * A.f(b, d, e) * r(c, d);
        out(a, c, e) += s;
      }
  return out;
}

Tensor3 cyb_brackets_parallel(const LieAlgebra& A, const Mat& r) {
  const int n = A.dim();
  const std::vector<Mat> F = slot_matrices(A);
  const Mat rt = r.transpose();
  Tensor3 x(n), y(n), z(n);
  // each loop writes a distinct slice per e
#pragma omp parallel for
  for (int e = 0; e < n; ++e) {
    const Mat m = rt * F[static_cast<std::size_t>(e)] * r;
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) x(e, b, d) = m(b, d);
  }
#pragma omp parallel for
  for (int e = 0; e < n; ++e) {
    const Mat m = r * F[static_cast<std::size_t>(e)] * r;
    for (int a = 0; a < n; ++a)
      for (int d = 0; d < n; ++d) y(a, e, d) = m(a, d);
  }
#pragma omp parallel for
  for (int e = 0; e < n; ++e) {
    const Mat m = r * F[static_cast<std::size_t>(e)] * rt;
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) z(a, c, e) = m(a, c);
  }
  x += y;
  x += z;
  return x;
}

Tensor3 cyb_brackets(const LieAlgebra& A, const Mat& r, Kernel kernel) {
  return kernel == Kernel::Serial ? cyb_brackets_serial(A, r) : cyb_brackets_parallel(A, r);
}

Tensor3 derivative_terms(const Mat& K, const std::vector<Mat>& dr) {
  const int n = static_cast<int>(K.rows());
  Tensor3 out(n);
  for (std::size_t i = 0; i < dr.size(); ++i) {
    const auto k = K.col(static_cast<Eigen::Index>(i));
    const Mat& d = dr[i];
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int s = 0; s < n; ++s) out(p, q, s) += k(p) * d(q, s) - d(p, s) * k(q) + d(p, q) * k(s);
  }
  return out;
}

Tensor3 cdyb(const RMatrixField& r, const Vec& kappa, DerivMode mode, Kernel kernel) {
  const LieAlgebra& A = *r.algebra;
  const Mat Kdual = dual_basis(A, r.dyn_basis);
  std::vector<Mat> dr;
  dr.reserve(static_cast<std::size_t>(Kdual.cols()));
  for (Eigen::Index i = 0; i < Kdual.cols(); ++i) dr.push_back(r.derivative(kappa, Kdual.col(i), mode));
  Tensor3 out = cyb_brackets(A, r.eval(kappa), kernel);
  out += derivative_terms(r.dyn_basis, dr);
  return out;
}

double invariance_residual(const LieAlgebra& A, const Tensor3& T) {
  const int n = A.dim();
  double worst = 0.0;
  for (int x = 0; x < n; ++x) {
    const Mat& ad = A.ad_basis(x);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int s = 0; s < n; ++s) {
          cplx v{};
          for (int a = 0; a < n; ++a) v += ad(p, a) * T(a, q, s) + ad(q, a) * T(p, a, s) + ad(s, a) * T(p, q, a);
          worst = std::max(worst, std::abs(v));
        }
  }
  return worst;
}

double invariance_residual(const LieAlgebra& A, const Mat& r) {
  double worst = 0.0;
  for (int x = 0; x < A.dim(); ++x) {
    const Mat& ad = A.ad_basis(x);
    worst = std::max(worst, max_abs(Mat(ad * r + r * ad.transpose())));
  }
  return worst;
}

double equivariance_residual(const RMatrixField& r, const Vec& kappa, DerivMode mode) {
  const LieAlgebra& A = *r.algebra;
  const Mat value = r.eval(kappa);
  double worst = 0.0;
  for (Eigen::Index a = 0; a < r.dyn_basis.cols(); ++a) {
    const Vec x = r.dyn_basis.col(a);
    const Mat ad = A.ad(x);
    const Mat lhs = ad * value + value * ad.transpose();
    const Mat rhs = r.derivative(kappa, A.bracket(x, kappa), mode);
    worst = std::max(worst, max_abs(Mat(lhs - rhs)));
  }
  return worst;
}

double antisymmetry_residual(const Tensor3& T) {
  double worst = 0.0;
  for (const auto& perm : {std::array<int, 3>{1, 0, 2}, std::array<int, 3>{0, 2, 1}, std::array<int, 3>{2, 1, 0}}) {
    worst = std::max(worst, (T + T.permuted(perm)).max_abs());
  }
  return worst;
}

double VerificationReport::max_residual() const {
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, p.residual);
  return worst;
}

void VerificationReport::finalize() {
  pass = !points.empty();
  for (const auto& p : points) pass = pass && p.residual <= tol;
}

nlohmann::json complex_vector_json(const Vec& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

nlohmann::json to_json(const VerificationReport& report) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : report.points) {
    pts.push_back({{"index", p.index}, {"kappa", complex_vector_json(p.kappa)}, {"residual", p.residual}});
  }
  return {{"check", report.check},
          {"algebra", report.algebra},
          {"chain", report.chain},
          {"seeds", nlohmann::json::array({report.seed})},
          {"points", pts},
          {"tol", report.tol},
          {"max_residual", report.max_residual()},
          {"pass", report.pass},
          {"meta", report.meta}};
}

std::vector<Vec> sample_points(const RMatrixField& r, const SamplingSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<Vec> out;
  const Eigen::Index k = r.dyn_basis.cols();
  for (int attempt = 0; attempt < spec.max_attempts && static_cast<int>(out.size()) < spec.count; ++attempt) {
    Vec u(k);
    for (Eigen::Index i = 0; i < k; ++i) u(i) = uni(rng);
    const Vec kappa = spec.center + spec.radius * (r.dyn_basis * u);
    if (r.in_domain(kappa)) out.push_back(kappa);
  }
  if (out.empty()) {
    throw Error(ErrorKind::NoAdmissibleSamples,
                "no admissible sample for " + r.construction + " after " + std::to_string(spec.max_attempts) + " attempts");
  }
  return out;
}

VerificationReport run_samples(const std::string& check, const std::vector<Vec>& points, double tol,
                               const std::function<double(const Vec&)>& residual) {
  VerificationReport rep;
  rep.check = check;
  rep.tol = tol;
  const auto values = parallel_map<double>(static_cast<int>(points.size()),
                                           [&](int i) { return residual(points[static_cast<std::size_t>(i)]); });
  for (std::size_t i = 0; i < points.size(); ++i) rep.points.push_back({static_cast<int>(i), points[i], values[i]});
  rep.finalize();
  return rep;
}

VerificationReport check_equivariance(const RMatrixField& r, const std::vector<Vec>& points, double tol,
                                      DerivMode mode) {
  auto rep = run_samples("equivariance", points, tol, [&](const Vec& k) { return equivariance_residual(r, k, mode); });
  rep.meta["construction"] = r.construction;
  rep.meta["derivative"] = (mode == DerivMode::FiniteDifference || !r.has_exact_derivative()) ? "fd" : "exact";
  if (rep.meta["derivative"] == "fd") rep.meta["fd_step"] = r.fd_step;
  return rep;
}

VerificationReport check_invariant_constant(const LieAlgebra& A, const Tensor3& T, double tol) {
  VerificationReport rep;
  rep.check = "invariant-constant";
  rep.tol = tol;
  rep.points.push_back({0, Vec(), invariance_residual(A, T)});
  rep.finalize();
  return rep;
}

VerificationReport check_invariant_constant(const LieAlgebra& A, const Mat& r, double tol) {
  VerificationReport rep;
  rep.check = "invariant-constant";
  rep.tol = tol;
  rep.points.push_back({0, Vec(), invariance_residual(A, r)});
  rep.finalize();
  return rep;
}

CdybSuite cdyb_suite(const RMatrixField& r, const std::vector<Vec>& points, double tol, DerivMode mode) {
  const LieAlgebra& A = *r.algebra;
  const auto values = parallel_map<Tensor3>(static_cast<int>(points.size()),
                                            [&](int i) { return cdyb(r, points[static_cast<std::size_t>(i)], mode); });
  CdybSuite out;
  out.value = values.front();
  out.invariance.check = "cdyb-invariance";
  out.constancy.check = "cdyb-constancy";
  for (auto* rep : {&out.invariance, &out.constancy}) {
    rep->tol = tol;
    rep->meta["construction"] = r.construction;
    rep->meta["derivative"] = (mode == DerivMode::FiniteDifference || !r.has_exact_derivative()) ? "fd" : "exact";
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int idx = static_cast<int>(i);
    out.invariance.points.push_back({idx, points[i], invariance_residual(A, values[i])});
    out.constancy.points.push_back({idx, points[i], (values[i] - values.front()).max_abs()});
  }
  out.invariance.meta["cdyb_norm"] = out.value.max_abs();
  out.invariance.finalize();
  out.constancy.finalize();
  return out;
}

Prop1Result proposition1_suite(const RMatrixField& r, std::shared_ptr<const Chain> chain, const std::vector<Vec>& points,
                               double tol, DerivMode mode) {
  if (points.empty()) throw Error(ErrorKind::NoAdmissibleSamples, "reduction suite needs sample points");
  const RMatrixField dfield = dirac_field(chain);
  const RMatrixField rstar = reduce(r, chain);

  struct Row {
    double d = 0.0, eq = 0.0;
    Tensor3 orig;
  };
  const auto rows = parallel_map<Row>(static_cast<int>(points.size()), [&](int i) {
    const Vec& k = points[static_cast<std::size_t>(i)];
    Row row;
    row.d = cdyb(dfield, k, mode).max_abs();
    row.orig = cdyb(r, chain->lift(k), mode);
    row.eq = (cdyb(rstar, k, mode) - row.orig).max_abs();
    return row;
  });

  Prop1Result out;
  out.dirac_zero.check = "prop1-cdyb-D";
  out.equality.check = "prop1-equality";
  out.constancy.check = "prop1-constancy";
  for (auto* rep : {&out.dirac_zero, &out.equality, &out.constancy}) {
    rep->tol = tol;
    rep->meta["construction"] = r.construction;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int idx = static_cast<int>(i);
    out.dirac_zero.points.push_back({idx, points[i], rows[i].d});
    out.equality.points.push_back({idx, points[i], rows[i].eq});
    out.constancy.points.push_back({idx, points[i], (rows[i].orig - rows.front().orig).max_abs()});
  }
  out.dirac_zero.finalize();
  out.equality.finalize();
  out.constancy.finalize();
  return out;
}

Tensor3 bracket_12_13(const LieAlgebra& A, const Mat& a) {
  const int n = A.dim();
  const std::vector<Mat> F = slot_matrices(A);
  Tensor3 out(n);
  for (int e = 0; e < n; ++e) {
    const Mat m = a.transpose() * F[static_cast<std::size_t>(e)] * a;
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) out(e, b, d) = m(b, d);
  }
  return out;
}

double split_identity_check(const RMatrixField& r_antisym, const Mat& r_sym, const Vec& kappa, DerivMode mode) {
  const RMatrixField full = add_constant(r_antisym, r_sym, r_antisym.construction + "+sym");
  const Tensor3 lhs = cdyb(full, kappa, mode);
  const Tensor3 rhs = cdyb(r_antisym, kappa, mode) + bracket_12_13(*r_antisym.algebra, r_sym);
  return (lhs - rhs).max_abs();
}

Vec operator_cdybe_residual(const RMatrixField& r, const Chain& chain, const Vec& kappa, cplx C, const Vec& X,
                            const Vec& Y, DerivMode mode) {
  const LieAlgebra& A = *r.algebra;
  const Mat& B = A.form();
  const Mat R = r.eval(kappa) * B;
  auto dR = [&](const Vec& dir) { return Mat(r.derivative(kappa, dir, mode) * B); };

  const Vec RX = R * X;
  const Vec RY = R * Y;
  Vec out = A.bracket(RX, RY) - R * (A.bracket(X, RY) + A.bracket(RX, Y)) + C * C * A.bracket(X, Y);

  const Mat& K = chain.K();
  const Mat Kdual = dual_basis(A, K);
  for (Eigen::Index i = 0; i < K.cols(); ++i) {
    out += A.pairing(X, dR(K.col(i)) * Y) * Kdual.col(i);
  }
  out += dR(chain.P_K() * Y) * X - dR(chain.P_K() * X) * Y;
  return out;
}

}  // namespace drm
