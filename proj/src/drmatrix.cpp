#include "drm/drmatrix.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "drm/error.hpp"

namespace drm {

namespace {

bool is_domain_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::PoleProximity:
    case ErrorKind::InadmissibleSpectrum:
    case ErrorKind::IllConditioned:
    case ErrorKind::SingularC:
    case ErrorKind::SingularAd:
    case ErrorKind::OnWall:
      return true;
    default:
      return false;
  }
}

Mat sign_half_identity(const LieAlgebra& A, int sign) { return (0.5 * sign) * A.form_inverse(); }

int checked_sign(int sign) {
  if (sign != 1 && sign != -1) throw Error(ErrorKind::BadParams, "sign must be +1 or -1");
  return sign;
}

bool same_span(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  Mat both(a.rows(), a.cols() + b.cols());
  both << a, b;
  Eigen::FullPivLU<Mat> lu(both);
  lu.setThreshold(1e-10);
  return lu.rank() == a.cols();
}

// Adapted basis W = [K, K^perp] of A and its inverse, for block computations.
struct Blocks {
  Mat W, Winv;
  Eigen::Index nk = 0, nm = 0;
};

Blocks adapted_blocks(const Chain& chain) {
  if (chain.L().cols() != chain.algebra().dim()) {
    throw Error(ErrorKind::BadParams, "construction needs a chain with L = A");
  }
  Blocks b;
  b.nk = chain.K().cols();
  b.nm = chain.M().cols();
  b.W.resize(chain.algebra().dim(), b.nk + b.nm);
  b.W << chain.K(), chain.M();
  b.Winv = b.W.fullPivLu().inverse();
  return b;
}

}  // namespace

Mat RMatrixField::derivative(const Vec& kappa, const Vec& direction, DerivMode mode) const {
  if (mode == DerivMode::Exact && !exact_derivative_fn) {
    throw Error(ErrorKind::BadParams, construction + " has no exact derivative");
  }
  if (mode != DerivMode::FiniteDifference && exact_derivative_fn) return exact_derivative_fn(kappa, direction);
  const double h = fd_step;
  auto central = [&](double s) { return Mat((eval(kappa + s * direction) - eval(kappa - s * direction)) / (2.0 * s)); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

bool RMatrixField::in_domain(const Vec& kappa) const {
  try {
    (void)eval(kappa);
    return true;
  } catch (const Error& e) {
    if (is_domain_error(e.kind())) return false;
    throw;
  }
}

Mat to_operator(const LieAlgebra& A, const Mat& r) { return r * A.form(); }
Mat to_tensor(const LieAlgebra& A, const Mat& R) { return R * A.form_inverse(); }

RMatrixField constant_field(std::shared_ptr<const LieAlgebra> A, const Mat& dyn_basis, const Mat& r, std::string name) {
  RMatrixField out;
  const int n = A->dim();
  out.algebra = std::move(A);
  out.dyn_basis = dyn_basis;
  out.sym_part = 0.5 * (r + r.transpose());
  out.construction = std::move(name);
  out.eval_fn = [r](const Vec&) { return r; };
  out.exact_derivative_fn = [n](const Vec&, const Vec&) { return Mat(Mat::Zero(n, n)); };
  return out;
}

RMatrixField zero_field(std::shared_ptr<const LieAlgebra> A, const Mat& dyn_basis) {
  const int n = A->dim();
  return constant_field(std::move(A), dyn_basis, Mat::Zero(n, n), "zero");
}

RMatrixField antisymmetric_part(const RMatrixField& r) {
  RMatrixField out = r;
  const Mat s = r.sym_part;
  out.construction = r.construction + ".antisym";
  out.sym_part = Mat::Zero(r.dim(), r.dim());
  out.eval_fn = [f = r.eval_fn, s](const Vec& k) { return Mat(f(k) - s); };
  return out;
}

RMatrixField add_constant(const RMatrixField& r, const Mat& c, std::string name) {
  RMatrixField out = r;
  out.construction = std::move(name);
  out.sym_part = r.sym_part + 0.5 * (c + c.transpose());
  out.eval_fn = [f = r.eval_fn, c](const Vec& k) { return Mat(f(k) + c); };
  return out;
}

RMatrixField canonical_r(std::shared_ptr<const LieAlgebra> A, int sign, FuncalcOptions opts) {
  checked_sign(sign);
  RMatrixField out;
  const int n = A->dim();
  out.algebra = A;
  out.dyn_basis = Mat::Identity(n, n);
  out.sym_part = sign_half_identity(*A, sign);
  out.construction = sign > 0 ? "canonical+" : "canonical-";
  const Mat half = out.sym_part;
  const HoloFunc f = HoloFunc::f();
  out.eval_fn = [A, half, f, opts](const Vec& lambda) {
    return Mat(holo_apply(f, A->ad(lambda), opts) * A->form_inverse() + half);
  };
  out.exact_derivative_fn = [A, f, opts](const Vec& lambda, const Vec& x) {
    return Mat(holo_frechet(f, A->ad(lambda), A->ad(x), opts) * A->form_inverse());
  };
  return out;
}

Mat c_matrix(const Chain& chain, const Vec& kappa) {
  const LieAlgebra& A = chain.algebra();
  const Mat& M = chain.M();
  const Eigen::Index m = M.cols();
  // row vector kappa^T B P_K
  const Eigen::RowVectorXcd w = kappa.transpose() * A.form() * chain.P_K();
  Mat C = Mat::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const Mat adm = A.ad(M.col(a));
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const cplx v = -(w * (adm * M.col(b)))(0, 0);
      C(a, b) = v;
      C(b, a) = -v;
    }
  }
  return C;
}

namespace {

Mat c_inverse(const Chain& chain, const Vec& kappa, double cond_max) {
  const Mat C = c_matrix(chain, kappa);
  Eigen::JacobiSVD<Mat> svd(C);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  const double cond = smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
  if (!(cond < cond_max)) {
    std::ostringstream os;
    os << "C(kappa) is not invertible (condition number " << cond << ", smallest singular value " << smin << ")";
    throw Error(ErrorKind::SingularC, os.str());
  }
  return C.fullPivLu().inverse();
}

}  // namespace

Mat dirac_D(const Chain& chain, const Vec& kappa, double cond_max) {
  const int n = chain.algebra().dim();
  if (chain.nM() == 0) return Mat::Zero(n, n);
  const Mat D = c_inverse(chain, kappa, cond_max);
  return chain.M() * D * chain.M().transpose();
}

Mat dirac_D_derivative(const Chain& chain, const Vec& kappa, const Vec& direction, double cond_max) {
  const int n = chain.algebra().dim();
  if (chain.nM() == 0) return Mat::Zero(n, n);
  const Mat D = c_inverse(chain, kappa, cond_max);
  // C is linear in kappa, so dC = C(direction)
  const Mat dD = -D * c_matrix(chain, direction) * D;
  return chain.M() * dD * chain.M().transpose();
}

RMatrixField dirac_field(std::shared_ptr<const Chain> chain) {
  RMatrixField out;
  const int n = chain->algebra().dim();
  out.algebra = chain->algebra_ptr();
  out.dyn_basis = chain->K();
  out.sym_part = Mat::Zero(n, n);
  out.construction = "dirac";
  out.eval_fn = [chain](const Vec& k) { return dirac_D(*chain, k); };
  out.exact_derivative_fn = [chain](const Vec& k, const Vec& x) { return dirac_D_derivative(*chain, k, x); };
  return out;
}

RMatrixField reduce(const RMatrixField& r, std::shared_ptr<const Chain> chain) {
  if (!same_span(r.dyn_basis, chain->L())) {
    throw Error(ErrorKind::BadParams, "field '" + r.construction + "' is not dynamical over the chain's L");
  }
  RMatrixField out;
  out.algebra = r.algebra;
  out.dyn_basis = chain->K();
  out.sym_part = r.sym_part;
  out.construction = r.construction + "*";
  out.fd_step = r.fd_step;
  out.eval_fn = [f = r.eval_fn, chain](const Vec& k) { return Mat(f(chain->lift(k)) + dirac_D(*chain, k)); };
  if (r.has_exact_derivative()) {
    out.exact_derivative_fn = [d = r.exact_derivative_fn, chain](const Vec& k, const Vec& x) {
      return Mat(d(chain->lift(k), chain->lift(x)) + dirac_D_derivative(*chain, k, x));
    };
  }
  return out;
}

RMatrixField reduced_canonical(std::shared_ptr<const Chain> chain, int sign, FuncalcOptions opts) {
  checked_sign(sign);
  const auto A = chain->algebra_ptr();
  const auto blocks = std::make_shared<const Blocks>(adapted_blocks(*chain));
  RMatrixField out;
  out.algebra = A;
  out.dyn_basis = chain->K();
  out.sym_part = sign_half_identity(*A, sign);
  out.construction = sign > 0 ? "reduced-canonical+" : "reduced-canonical-";
  const Mat half = out.sym_part;
  const HoloFunc f = HoloFunc::f();
  const HoloFunc F = HoloFunc::F();

  auto split = [A, blocks](const Vec& x) {
    const Mat ad = blocks->Winv * A->ad(x) * blocks->W;
    return std::pair<Mat, Mat>{ad.topLeftCorner(blocks->nk, blocks->nk), ad.bottomRightCorner(blocks->nm, blocks->nm)};
  };
  auto assemble = [A, blocks](const Mat& top, const Mat& bottom) {
    Mat d = Mat::Zero(blocks->nk + blocks->nm, blocks->nk + blocks->nm);
    d.topLeftCorner(blocks->nk, blocks->nk) = top;
    d.bottomRightCorner(blocks->nm, blocks->nm) = bottom;
    return Mat(blocks->W * d * blocks->Winv * A->form_inverse());
  };
  auto check_invertible = [opts](const Mat& perp) {
    if (perp.size() == 0) return;
    Eigen::ComplexEigenSolver<Mat> es(perp, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (std::abs(es.eigenvalues()(i)) <= opts.margin) {
        throw Error(ErrorKind::SingularAd, "ad kappa is not invertible on the orthogonal complement of K");
      }
    }
  };

  out.eval_fn = [=](const Vec& k) {
    const auto [top, bottom] = split(k);
    check_invertible(bottom);
    return Mat(assemble(holo_apply(f, top, opts), holo_apply(F, bottom, opts)) + half);
  };
  out.exact_derivative_fn = [=](const Vec& k, const Vec& x) {
    const auto [top, bottom] = split(k);
    check_invertible(bottom);
    const auto [dtop, dbottom] = split(x);
    return assemble(holo_frechet(f, top, dtop, opts), holo_frechet(F, bottom, dbottom, opts));
  };
  return out;
}

std::vector<Root> root_data(const Chain& chain) {
  const LieAlgebra& A = chain.algebra();
  const Mat& K = chain.K();
  const Mat& M = chain.M();
  const Eigen::Index nk = K.cols();
  const Eigen::Index nm = M.cols();
  const Mat Mpinv = M.completeOrthogonalDecomposition().pseudoInverse();
  const Mat Kdual = dual_basis(A, K);

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(0.5, 1.5);
  for (int attempt = 0; attempt < 20; ++attempt) {
    Vec reg = Vec::Zero(A.dim());
    for (Eigen::Index i = 0; i < nk; ++i) reg += uni(rng) * K.col(i);
    const Mat block = Mpinv * A.ad(reg) * M;
    Eigen::ComplexEigenSolver<Mat> es(block);
    const Vec& ev = es.eigenvalues();

    bool regular = true;
    for (Eigen::Index i = 0; i < nm && regular; ++i) {
      if (std::abs(ev(i)) < 1e-6) regular = false;
      for (Eigen::Index j = i + 1; j < nm; ++j) {
        if (std::abs(ev(i) - ev(j)) < 1e-6) regular = false;
      }
    }
    if (!regular) continue;

    std::vector<Root> roots(static_cast<std::size_t>(nm));
    for (Eigen::Index i = 0; i < nm; ++i) {
      Root& r = roots[static_cast<std::size_t>(i)];
      Vec v = M * es.eigenvectors().col(i);
      Eigen::Index big = 0;
      v.cwiseAbs().maxCoeff(&big);
      v /= v(big);
      r.vec = v;
      r.alpha_on_K.resize(nk);
      for (Eigen::Index j = 0; j < nk; ++j) {
        r.alpha_on_K(j) = v.dot(A.ad(K.col(j)) * v) / v.squaredNorm();
      }
      r.h_alpha = Kdual * r.alpha_on_K;
      r.norm2 = A.pairing(r.h_alpha, r.h_alpha);
    }
    for (std::size_t i = 0; i < roots.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < roots.size(); ++j) {
        const double d = max_abs(Vec(roots[i].alpha_on_K + roots[j].alpha_on_K));
        if (d < best) {
          best = d;
          roots[i].negative = static_cast<int>(j);
        }
      }
      if (best > 1e-8) throw Error(ErrorKind::BadParams, "root system of K is not symmetric under alpha -> -alpha");
    }
    for (std::size_t i = 0; i < roots.size(); ++i) {
      Root& pos = roots[i];
      auto& neg = roots[static_cast<std::size_t>(pos.negative)];
      if (static_cast<std::size_t>(pos.negative) < i) continue;
      const cplx pairing = A.pairing(pos.vec, neg.vec);
      if (std::abs(pairing) < 1e-12 || std::abs(pos.norm2) < 1e-12) {
        throw Error(ErrorKind::DegenerateRestriction, "root spaces of alpha and -alpha do not pair");
      }
      neg.vec *= 2.0 / (pos.norm2 * pairing);
    }
    return roots;
  }
  throw Error(ErrorKind::BadParams, "could not find a regular element of K");
}

cplx root_value(const Root& root, const Chain& chain, const Vec& kappa) {
  return chain.algebra().pairing(root.h_alpha, kappa);
}

namespace {

void require_off_wall(cplx a) {
  if (std::abs(a) <= 1e-10) throw Error(ErrorKind::OnWall, "kappa lies on a wall: alpha(kappa) = 0");
  if (distance_to_lattice(a, true) <= 1e-6) throw Error(ErrorKind::OnWall, "kappa lies on a wall: alpha(kappa) in 2 pi i Z");
}

RMatrixField root_sum_field(std::shared_ptr<const Chain> chain, std::string name, Mat constant,
                            std::function<cplx(cplx, cplx)> coeff, std::function<cplx(cplx, cplx, cplx)> dcoeff,
                            bool trig) {
  const auto roots = std::make_shared<const std::vector<Root>>(root_data(*chain));
  RMatrixField out;
  out.algebra = chain->algebra_ptr();
  out.dyn_basis = chain->K();
  out.sym_part = constant;
  out.construction = std::move(name);
  out.eval_fn = [=](const Vec& k) {
    Mat r = constant;
    for (const Root& root : *roots) {
      const cplx a = root_value(root, *chain, k);
      if (trig) {
        require_off_wall(a);
      } else if (std::abs(a) <= 1e-10) {
        throw Error(ErrorKind::OnWall, "kappa lies on a wall: alpha(kappa) = 0");
      }
      r += coeff(root.norm2, a) * root.vec * (*roots)[static_cast<std::size_t>(root.negative)].vec.transpose();
    }
    return r;
  };
  out.exact_derivative_fn = [=](const Vec& k, const Vec& x) {
    const int n = chain->algebra().dim();
    Mat r = Mat::Zero(n, n);
    for (const Root& root : *roots) {
      const cplx a = root_value(root, *chain, k);
      if (trig) require_off_wall(a);
      r += dcoeff(root.norm2, a, root_value(root, *chain, x)) * root.vec *
           (*roots)[static_cast<std::size_t>(root.negative)].vec.transpose();
    }
    return r;
  };
  return out;
}

}  // namespace

RMatrixField trig_cartan(std::shared_ptr<const Chain> chain, int sign) {
  checked_sign(sign);
  const Mat half = sign_half_identity(chain->algebra(), sign);
  return root_sum_field(
      chain, sign > 0 ? "trig+" : "trig-", half,
      [](cplx n2, cplx a) { return n2 / 4.0 / std::tanh(0.5 * a); },
      [](cplx n2, cplx a, cplx da) {
        const cplx s = std::sinh(0.5 * a);
        return -n2 / 8.0 * da / (s * s);
      },
      true);
}

RMatrixField rational_cartan(std::shared_ptr<const Chain> chain) {
  const int n = chain->algebra().dim();
  return root_sum_field(
      chain, "rational", Mat::Zero(n, n), [](cplx n2, cplx a) { return n2 / (2.0 * a); },
      [](cplx n2, cplx a, cplx da) { return -n2 * da / (2.0 * a * a); }, false);
}

}  // namespace drm
