#include "drm/affine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "drm/catalog.hpp"
#include "drm/error.hpp"

namespace drm {

namespace {

std::set<int> grades_of(const AffineElement& x) {
  std::set<int> out;
  for (const auto& [n, v] : x.loop) out.insert(n);
  if (x.c != cplx{} || x.d != cplx{}) out.insert(0);
  return out;
}

void add_loop(AffineElement& x, int n, const Vec& v) {
  auto it = x.loop.find(n);
  if (it == x.loop.end()) {
    x.loop.emplace(n, v);
  } else {
    it->second += v;
  }
}

// Caches the R blocks and their derivatives along the A_0 basis for one kappa.
class RContext {
 public:
  RContext(const TwistedGrading& g, const AffineKappa& kappa, const FuncalcOptions& opts)
      : g_(g), kappa_(kappa), opts_(opts) {
    const int n0 = block_dim(g, 0);
    const Mat gram = block_pairing(g, 0);
    const Mat ginv = gram.fullPivLu().inverse();
    for (int i = 0; i < n0; ++i) {
      Vec e = Vec::Zero(n0);
      e(i) = 1.0;
      basis0_.push_back(block_element(g, 0, e));
      dual0_.push_back(block_element(g, 0, ginv.col(i)));
    }
  }

  const Mat& R(int n) {
    auto it = R_.find(n);
    if (it == R_.end()) it = R_.emplace(n, affine_R_block(g_, kappa_, n, opts_)).first;
    return it->second;
  }

  // derivative of the n-block along the i-th A_0 basis vector
  const Mat& dR(int n, int i) {
    const auto key = std::make_pair(n, i);
    auto it = dR_.find(key);
    if (it == dR_.end()) {
      it = dR_.emplace(key, affine_R_block_derivative(g_, kappa_, basis0_[static_cast<std::size_t>(i)], n, opts_)).first;
    }
    return it->second;
  }

  AffineElement apply(const AffineElement& x) {
    AffineElement out;
    for (int n : grades_of(x)) out += block_element(g_, n, R(n) * block_coords(g_, n, x));
    return out;
  }

  // (d_T R) x for T in A_0
  AffineElement apply_derivative(const AffineElement& T, const AffineElement& x) {
    const Vec t = block_coords(g_, 0, T);
    AffineElement out;
    for (int n : grades_of(x)) {
      const Vec xc = block_coords(g_, n, x);
      Vec acc = Vec::Zero(xc.size());
      for (Eigen::Index i = 0; i < t.size(); ++i) {
        if (t(i) != cplx{}) acc += t(i) * (dR(n, static_cast<int>(i)) * xc);
      }
      out += block_element(g_, n, acc);
    }
    return out;
  }

  const std::vector<AffineElement>& basis0() const { return basis0_; }
  const std::vector<AffineElement>& dual0() const { return dual0_; }

 private:
  const TwistedGrading& g_;
  AffineKappa kappa_;
  FuncalcOptions opts_;
  std::map<int, Mat> R_;
  std::map<std::pair<int, int>, Mat> dR_;
  std::vector<AffineElement> basis0_, dual0_;
};

AffineElement grade0_part(const TwistedGrading& g, const AffineElement& x) {
  return block_element(g, 0, block_coords(g, 0, x));
}

}  // namespace

TwistedGrading build_twisted_grading(std::shared_ptr<const LieAlgebra> G, const Mat& mu, double tol, int max_order) {
  const LieAlgebra& A = *G;
  const int n = A.dim();
  if (mu.rows() != n || mu.cols() != n) throw Error(ErrorKind::BadParams, "automorphism must be dim x dim");

  const double fs = std::max(1.0, A.structure().max_abs());
  double hom = 0.0;
  for (int a = 0; a < n; ++a) {
    hom = std::max(hom, max_abs(Mat(mu * A.ad_basis(a) - A.ad(mu.col(a)) * mu)));
  }
  if (hom > tol * fs * std::max(1.0, max_abs(mu))) {
    throw Error(ErrorKind::NotAutomorphism, "mu does not preserve the bracket, residual " + std::to_string(hom));
  }
  const double iso = max_abs(Mat(mu.transpose() * A.form() * mu - A.form()));
  if (iso > tol * std::max(1.0, max_abs(A.form()))) {
    throw Error(ErrorKind::NotIsometry, "mu does not preserve the invariant form, residual " + std::to_string(iso));
  }

  int N = 0;
  Mat power = mu;
  for (int k = 1; k <= max_order; ++k) {
    if (max_abs(Mat(power - Mat::Identity(n, n))) <= tol) {
      N = k;
      break;
    }
    power = power * mu;
  }
  if (N == 0) throw Error(ErrorKind::WrongOrder, "mu has no finite order <= " + std::to_string(max_order));

  TwistedGrading g;
  g.G_ = std::move(G);
  g.mu_ = mu;
  g.N_ = N;
  int total = 0;
  for (int a = 0; a < N; ++a) {
    Mat P = Mat::Zero(n, n);
    Mat pw = Mat::Identity(n, n);
    for (int j = 0; j < N; ++j) {
      P += std::exp(cplx{0.0, -2.0 * kPi * a * j / N}) * pw;
      pw = pw * mu;
    }
    P /= static_cast<double>(N);
    // clean rounding noise so coordinate eigenspaces stay exact
    for (Eigen::Index i = 0; i < P.size(); ++i) {
      if (std::abs(P(i)) < 1e-14) P(i) = 0.0;
    }
    Eigen::ColPivHouseholderQR<Mat> qr(P);
    qr.setThreshold(1e-10);
    const Eigen::Index rank = qr.rank();
    Mat basis(n, rank);
    for (Eigen::Index i = 0; i < rank; ++i) basis.col(i) = P.col(qr.colsPermutation().indices()(i));
    g.proj_.push_back(P);
    g.coord_.push_back(rank > 0 ? Mat(basis.completeOrthogonalDecomposition().pseudoInverse() * P) : Mat(0, n));
    g.basis_.push_back(std::move(basis));
    total += static_cast<int>(rank);
  }
  if (total != n) throw Error(ErrorKind::WrongOrder, "eigenspaces of mu do not span G");
  if (g.basis_[0].cols() == 0) throw Error(ErrorKind::NoFixedPoints, "mu has no nonzero fixed points");
  return g;
}

double TwistedGrading::orthogonality_residual() const {
  double worst = 0.0;
  for (int a = 0; a < N_; ++a) {
    for (int b = 0; b < N_; ++b) {
      if ((a + b) % N_ == 0) continue;
      worst = std::max(worst, max_abs(Mat(basis_[a].transpose() * G_->form() * basis_[b])));
    }
  }
  return worst;
}

Mat sl_diagonal_automorphism(const LieAlgebra& sl, const std::vector<cplx>& h) {
  const int n = static_cast<int>(h.size());
  const auto basis = sl_matrix_basis(n);
  if (static_cast<int>(basis.size()) != sl.dim()) throw Error(ErrorKind::BadParams, "diagonal automorphism size mismatch");
  Vec hv(n);
  for (int i = 0; i < n; ++i) hv(i) = h[static_cast<std::size_t>(i)];
  const Mat H = hv.asDiagonal();
  const Mat Hinv = hv.cwiseInverse().asDiagonal();
  Mat mu(sl.dim(), sl.dim());
  for (std::size_t a = 0; a < basis.size(); ++a) mu.col(static_cast<Eigen::Index>(a)) = sl_coordinates(H * basis[a] * Hinv);
  return mu;
}

Mat named_automorphism(const LieAlgebra& G, const std::string& name) {
  if (name == "id" || name == "identity") return Mat::Identity(G.dim(), G.dim());
  if (name == "coxeter") {
    const int n = static_cast<int>(std::lround(std::sqrt(G.dim() + 1.0)));
    if (n * n - 1 != G.dim() || !G.index_of(n == 2 ? "E" : "E12")) {
      throw Error(ErrorKind::BadParams, "the coxeter automorphism needs sl(n)");
    }
    std::vector<cplx> h;
    for (int i = 0; i < n; ++i) h.push_back(std::exp(cplx{0.0, 2.0 * kPi * i / n}));
    return sl_diagonal_automorphism(G, h);
  }
  throw Error(ErrorKind::UnknownName, "unknown automorphism '" + name + "'");
}

AffineElement& AffineElement::operator+=(const AffineElement& o) {
  for (const auto& [n, v] : o.loop) add_loop(*this, n, v);
  c += o.c;
  d += o.d;
  return *this;
}

AffineElement& AffineElement::operator*=(cplx s) {
  for (auto& [n, v] : loop) v *= s;
  c *= s;
  d *= s;
  return *this;
}

double AffineElement::max_abs() const {
  double m = std::max(std::abs(c), std::abs(d));
  for (const auto& [n, v] : loop) m = std::max(m, drm::max_abs(v));
  return m;
}

void validate(const TwistedGrading& g, const AffineElement& x) {
  for (const auto& [n, v] : x.loop) {
    const int a = g.residue(n);
    const double r = max_abs(Vec(g.projection(a) * v - v));
    if (r > 1e-12 * std::max(1.0, max_abs(v))) {
      throw Error(ErrorKind::GradeMismatch, "loop term at grade " + std::to_string(n) + " is not in G_" + std::to_string(a));
    }
  }
}

AffineElement affine_bracket(const TwistedGrading& g, const AffineElement& x, const AffineElement& y) {
  validate(g, x);
  validate(g, y);
  const LieAlgebra& G = g.algebra();
  AffineElement out;
  for (const auto& [n, xi] : x.loop) {
    for (const auto& [p, eta] : y.loop) {
      add_loop(out, n + p, G.bracket(xi, eta));
      if (n + p == 0) out.c += static_cast<double>(n) * G.pairing(xi, eta);
    }
  }
  // [d, eta^p] = p eta^p and [xi^n, d] = -n xi^n
  for (const auto& [p, eta] : y.loop) {
    if (x.d != cplx{} && p != 0) add_loop(out, p, (x.d * static_cast<double>(p)) * eta);
  }
  for (const auto& [n, xi] : x.loop) {
    if (y.d != cplx{} && n != 0) add_loop(out, n, (-y.d * static_cast<double>(n)) * xi);
  }
  return out;
}

cplx affine_form(const TwistedGrading& g, const AffineElement& x, const AffineElement& y) {
  cplx s = x.c * y.d + x.d * y.c;
  for (const auto& [n, xi] : x.loop) {
    auto it = y.loop.find(-n);
    if (it != y.loop.end()) s += g.algebra().pairing(xi, it->second);
  }
  return s;
}

AffineElement to_element(const AffineKappa& kappa) {
  AffineElement e;
  e.loop.emplace(0, kappa.omega);
  e.d = kappa.k;
  e.c = kappa.l;
  return e;
}

Vec seeded_omega(const TwistedGrading& g, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec coeffs(g.eigenspace_dim(0));
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) coeffs(j) = u(rng);
  return scale * (g.eigenbasis(0) * coeffs);
}

int block_dim(const TwistedGrading& g, int n) {
  return g.eigenspace_dim(g.residue(n)) + (n == 0 ? 2 : 0);
}

AffineElement block_element(const TwistedGrading& g, int n, const Vec& coords) {
  const int a = g.residue(n);
  const Mat& basis = g.eigenbasis(a);
  const Eigen::Index m = basis.cols();
  if (coords.size() != block_dim(g, n)) throw Error(ErrorKind::BadParams, "block coordinate size mismatch");
  AffineElement e;
  if (m > 0) e.loop.emplace(n, basis * coords.head(m));
  if (n == 0) {
    e.d = coords(m);
    e.c = coords(m + 1);
  }
  return e;
}

Vec block_coords(const TwistedGrading& g, int n, const AffineElement& x) {
  const int a = g.residue(n);
  const Eigen::Index m = g.eigenspace_dim(a);
  Vec out = Vec::Zero(block_dim(g, n));
  auto it = x.loop.find(n);
  if (it != x.loop.end() && m > 0) out.head(m) = g.coordinates(a, it->second);
  if (n == 0) {
    out(m) = x.d;
    out(m + 1) = x.c;
  }
  return out;
}

namespace {

// ad(tau) restricted to G_a in eigenbasis coordinates
Mat loop_block(const TwistedGrading& g, const Vec& tau, int a) {
  const Mat& basis = g.eigenbasis(a);
  if (basis.cols() == 0) return Mat(0, 0);
  Mat out(basis.cols(), basis.cols());
  const Mat ad = g.algebra().ad(tau);
  for (Eigen::Index j = 0; j < basis.cols(); ++j) out.col(j) = g.coordinates(a, ad * basis.col(j));
  return out;
}

Mat grade_block(const TwistedGrading& g, const Vec& tau, cplx t_d, int n) {
  const int a = g.residue(n);
  const Mat lb = loop_block(g, tau, a);
  if (n != 0) return Mat(lb + (t_d * static_cast<double>(n)) * Mat::Identity(lb.rows(), lb.cols()));
  // [tau, d] = 0 and c is central, so the d and c columns vanish
  const Eigen::Index m = lb.rows();
  Mat out = Mat::Zero(m + 2, m + 2);
  out.topLeftCorner(m, m) = lb;
  return out;
}

Vec grade0_loop(const TwistedGrading& g, const AffineElement& T) {
  for (const auto& [n, v] : T.loop) {
    if (n != 0 && max_abs(v) > 0.0) throw Error(ErrorKind::BadGrade, "derivative direction must lie in A_0");
  }
  auto it = T.loop.find(0);
  return it == T.loop.end() ? Vec(Vec::Zero(g.algebra().dim())) : it->second;
}

}  // namespace

Mat ad_kappa_block(const TwistedGrading& g, const AffineKappa& kappa, int n) {
  validate(g, to_element(kappa));
  return grade_block(g, kappa.omega, kappa.k, n);
}

Mat ad_direction_block(const TwistedGrading& g, const AffineElement& T, int n) {
  return grade_block(g, grade0_loop(g, T), T.d, n);
}

Mat affine_R_block(const TwistedGrading& g, const AffineKappa& kappa, int n, const FuncalcOptions& opts) {
  const Mat ad = ad_kappa_block(g, kappa, n);
  return holo_apply(n == 0 ? HoloFunc::f() : HoloFunc::F(), ad, opts);
}

Mat affine_R_block_derivative(const TwistedGrading& g, const AffineKappa& kappa, const AffineElement& T, int n,
                              const FuncalcOptions& opts) {
  const Mat ad = ad_kappa_block(g, kappa, n);
  return holo_frechet(n == 0 ? HoloFunc::f() : HoloFunc::F(), ad, ad_direction_block(g, T, n), opts);
}

Mat block_pairing(const TwistedGrading& g, int n) {
  const Mat& bp = g.eigenbasis(g.residue(n));
  const Mat& bm = g.eigenbasis(g.residue(-n));
  const Mat loop = bp.transpose() * g.algebra().form() * bm;
  if (n != 0) return loop;
  const Eigen::Index m = loop.rows();
  Mat out = Mat::Zero(m + 2, m + 2);
  out.topLeftCorner(m, m) = loop;
  out(m, m + 1) = 1.0;
  out(m + 1, m) = 1.0;
  return out;
}

AffineDomainReport domain_check(const TwistedGrading& g, const AffineKappa& kappa, int window, double margin) {
  AffineDomainReport rep;
  rep.window = window;
  rep.min_distance = std::numeric_limits<double>::infinity();
  for (int n = -window; n <= window; ++n) {
    if (block_dim(g, n) == 0) continue;
    const auto sr = spectrum_check(n == 0 ? HoloFunc::f() : HoloFunc::F(), ad_kappa_block(g, kappa, n), margin);
    rep.block_distance[n] = sr.min_pole_distance;
    rep.min_distance = std::min(rep.min_distance, sr.min_pole_distance);
  }
  rep.window_admissible = rep.min_distance > margin;

  const double rek = kappa.k.real();
  if (std::abs(rek) < 1e-14) {
    rep.note = "k is purely imaginary; no all-grades certificate";
    return rep;
  }
  // spectrum of block n != 0 is {k n + lambda_j}; only n near -Re(lambda)/Re(k)
  // can come close to 2 pi i Z, since |Re(k n + lambda)| grows linearly in n
  double best = rep.block_distance.count(0) ? rep.block_distance[0] : std::numeric_limits<double>::infinity();
  for (int a = 0; a < g.order(); ++a) {
    if (g.eigenspace_dim(a) == 0) continue;
    Eigen::ComplexEigenSolver<Mat> es(loop_block(g, kappa.omega, a), false);
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
      const cplx lam = es.eigenvalues()(j);
      const double nstar = -lam.real() / rek;
      for (long span = 0;; ++span) {
        const long lo = static_cast<long>(std::floor(nstar)) - span;
        const long hi = static_cast<long>(std::ceil(nstar)) + span;
        for (long n : {lo, hi}) {
          if (n == 0 || ((n % g.order()) + g.order()) % g.order() != a) continue;
          best = std::min(best, distance_to_lattice(kappa.k * static_cast<double>(n) + lam, false));
        }
        if (std::abs(rek) * span > best || span > 1000000) break;
      }
    }
  }
  rep.all_grades_distance = best;
  rep.all_grades_certified = best > margin;
  if (!rep.all_grades_certified) {
    std::ostringstream os;
    os << "integer collision: some k n + lambda lies within " << best << " of 2 pi i Z";
    rep.note = os.str();
  }
  return rep;
}

AffineElement prop2_residual(const TwistedGrading& g, const AffineKappa& kappa, const AffineElement& X,
                             const AffineElement& Y, cplx C, const FuncalcOptions& opts) {
  RContext ctx(g, kappa, opts);
  const AffineElement RX = ctx.apply(X);
  const AffineElement RY = ctx.apply(Y);
  AffineElement out = affine_bracket(g, RX, RY);
  out += ctx.apply(affine_bracket(g, X, RY) + affine_bracket(g, RX, Y)) * cplx{-1.0};
  out += (C * C) * affine_bracket(g, X, Y);
  const auto& K = ctx.basis0();
  const auto& Kd = ctx.dual0();
  for (std::size_t i = 0; i < K.size(); ++i) {
    const cplx w = affine_form(g, X, ctx.apply_derivative(K[i], Y));
    if (w != cplx{}) out += w * Kd[i];
  }
  out += ctx.apply_derivative(grade0_part(g, Y), X);
  out += ctx.apply_derivative(grade0_part(g, X), Y) * cplx{-1.0};
  return out;
}

VerificationReport verify_prop2(const TwistedGrading& g, const AffineKappa& kappa, int window, int pairs,
                                std::uint64_t seed, double tol, const FuncalcOptions& opts) {
  const auto dom = domain_check(g, kappa, window, opts.margin);
  if (!dom.window_admissible) {
    throw Error(ErrorKind::InadmissibleSpectrum, "kappa is outside the domain on the grade window");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_int_distribution<int> grade(-window, window);
  auto random_block = [&](int n) {
    Vec v(block_dim(g, n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx{uni(rng), uni(rng)};
    return block_element(g, n, v);
  };

  // fixed opening pairs cover the 0.0, 0.n and n.(-n) interactions
  std::vector<std::pair<int, int>> grades;
  for (const auto& gp : std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 0}, {1, -1}, {-1, 1}}) {
    if (std::abs(gp.first) <= window && std::abs(gp.second) <= window) grades.push_back(gp);
  }
  while (static_cast<int>(grades.size()) < pairs) {
    const int m = grade(rng);
    const int n = grade(rng);
    if (std::abs(m + n) <= window) grades.emplace_back(m, n);
  }
  grades.resize(static_cast<std::size_t>(std::max(pairs, 0)));

  std::vector<std::pair<AffineElement, AffineElement>> xy;
  nlohmann::json grade_list = nlohmann::json::array();
  for (const auto& [m, n] : grades) {
    if (block_dim(g, m) == 0 || block_dim(g, n) == 0) continue;
    xy.emplace_back(random_block(m), random_block(n));
    grade_list.push_back({m, n});
  }

  VerificationReport rep;
  rep.check = "prop2";
  rep.seed = seed;
  rep.tol = tol;
  std::vector<double> res(xy.size());
  std::vector<std::exception_ptr> errs(xy.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < static_cast<int>(xy.size()); ++i) {
    try {
      const auto& [X, Y] = xy[static_cast<std::size_t>(i)];
      res[static_cast<std::size_t>(i)] = prop2_residual(g, kappa, X, Y, 0.5, opts).max_abs();
    } catch (...) {
      errs[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t i = 0; i < xy.size(); ++i) rep.points.push_back({static_cast<int>(i), kappa.omega, res[i]});
  rep.meta["window"] = window;
  rep.meta["N"] = g.order();
  rep.meta["k"] = {kappa.k.real(), kappa.k.imag()};
  rep.meta["l"] = {kappa.l.real(), kappa.l.imag()};
  rep.meta["grades"] = grade_list;
  rep.meta["derivative"] = "exact";
  rep.meta["all_grades_certified"] = dom.all_grades_certified;
  rep.finalize();
  return rep;
}

nlohmann::json grading_json(const TwistedGrading& g, const std::string& name) {
  nlohmann::json mu = nlohmann::json::array();
  for (Eigen::Index i = 0; i < g.mu().rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < g.mu().cols(); ++j) row.push_back({g.mu()(i, j).real(), g.mu()(i, j).imag()});
    mu.push_back(row);
  }
  nlohmann::json dims = nlohmann::json::object();
  for (int a = 0; a < g.order(); ++a) dims[std::to_string(a)] = g.eigenspace_dim(a);
  return {{"schema_version", 1},
          {"G", {{"name", name}, {"dim", g.algebra().dim()}, {"labels", g.algebra().labels()}}},
          {"mu", mu},
          {"N", g.order()},
          {"eigenspace_dims", dims}};
}

}  // namespace drm
