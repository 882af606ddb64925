#include "drm/lie_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drm/error.hpp"

namespace drm {

namespace {

std::string triple_name(const std::vector<std::string>& labels, std::initializer_list<int> idx) {
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (int i : idx) {
    if (!first) os << ",";
    first = false;
    if (i >= 0 && static_cast<std::size_t>(i) < labels.size()) {
      os << labels[static_cast<std::size_t>(i)];
    } else {
      os << i;
    }
  }
  os << ")";
  return os.str();
}

}  // namespace

AxiomReport check_axioms(const Tensor3& f, const Mat& form) {
  AxiomReport rep;
  const int n = f.dim();
  rep.structure_scale = f.max_abs();
  rep.form_scale = max_abs(form);

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        const double r = std::abs(f(a, b, c) + f(b, a, c));
        if (r > rep.antisymmetry) {
          rep.antisymmetry = r;
          rep.antisymmetry_at = {a, b, c};
        }
      }
    }
  }

  // sum_e f_ab^e f_ec^d + f_bc^e f_ea^d + f_ca^e f_eb^d
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          cplx s{};
          for (int e = 0; e < n; ++e) {
            s += f(a, b, e) * f(e, c, d) + f(b, c, e) * f(e, a, d) + f(c, a, e) * f(e, b, d);
          }
          if (std::abs(s) > rep.jacobi) {
            rep.jacobi = std::abs(s);
            rep.jacobi_at = {a, b, c, d};
          }
        }
      }
    }
  }

  // <[T_a,T_b],T_c> + <T_b,[T_a,T_c]>
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        cplx s{};
        for (int e = 0; e < n; ++e) s += f(a, b, e) * form(e, c) + form(b, e) * f(a, c, e);
        if (std::abs(s) > rep.invariance) {
          rep.invariance = std::abs(s);
          rep.invariance_at = {a, b, c};
        }
      }
    }
  }

  Eigen::JacobiSVD<Mat> svd(form);
  const auto& sv = svd.singularValues();
  rep.max_singular = sv.size() ? sv(0) : 0.0;
  rep.min_singular = sv.size() ? sv(sv.size() - 1) : 0.0;
  return rep;
}

LieAlgebra LieAlgebra::build(Tensor3 f, Mat form, std::vector<std::string> labels, double tol) {
  const int n = f.dim();
  if (n <= 0) throw Error(ErrorKind::BadParams, "algebra dimension must be positive");
  if (form.rows() != n || form.cols() != n) {
    throw Error(ErrorKind::BadParams, "form must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (labels.empty()) {
    for (int a = 0; a < n; ++a) labels.push_back("T" + std::to_string(a));
  }
  if (static_cast<int>(labels.size()) != n) throw Error(ErrorKind::BadParams, "label count does not match dimension");
  if (!f.all_finite() || !form.allFinite()) throw Error(ErrorKind::BadParams, "non-finite structure data");

  const double symm = max_abs(Mat(form - form.transpose()));
  if (symm > tol * std::max(1.0, max_abs(form))) {
    throw Error(ErrorKind::InvarianceViolation, "form is not symmetric, residual " + std::to_string(symm));
  }

  const AxiomReport rep = check_axioms(f, form);
  const double fs = std::max(1.0, rep.structure_scale);
  const double bs = std::max(1.0, rep.form_scale);
  std::ostringstream msg;
  msg.precision(3);
  if (rep.antisymmetry > tol * fs) {
    const auto& t = rep.antisymmetry_at;
    msg << "worst triple " << triple_name(labels, {t[0], t[1], t[2]}) << " residual " << rep.antisymmetry;
    throw Error(ErrorKind::AntisymmetryViolation, msg.str());
  }
  if (rep.jacobi > tol * fs * fs) {
    const auto& t = rep.jacobi_at;
    msg << "worst triple " << triple_name(labels, {t[0], t[1], t[2]}) << " (component " << labels[static_cast<std::size_t>(t[3])]
        << ") residual " << rep.jacobi;
    throw Error(ErrorKind::JacobiViolation, msg.str());
  }
  if (rep.invariance > tol * fs * bs) {
    const auto& t = rep.invariance_at;
    msg << "worst triple " << triple_name(labels, {t[0], t[1], t[2]}) << " residual " << rep.invariance;
    throw Error(ErrorKind::InvarianceViolation, msg.str());
  }
  if (rep.min_singular <= tol * std::max(1.0, rep.max_singular)) {
    msg << "smallest singular value " << rep.min_singular;
    throw Error(ErrorKind::DegenerateForm, msg.str());
  }
  return LieAlgebra(std::move(f), std::move(form), std::move(labels));
}

LieAlgebra::LieAlgebra(Tensor3 f, Mat form, std::vector<std::string> labels)
    : f_(std::move(f)), form_(std::move(form)), labels_(std::move(labels)) {
  const int n = f_.dim();
  form_inv_ = form_.fullPivLu().inverse();
  // symmetrize away rounding so that the identity tensor is exactly symmetric
  form_inv_ = (0.5 * (form_inv_ + form_inv_.transpose())).eval();
  ad_basis_.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    Mat m = Mat::Zero(n, n);
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) m(c, b) = f_(a, b, c);
    }
    ad_basis_.push_back(std::move(m));
  }
}

std::optional<int> LieAlgebra::index_of(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

Vec LieAlgebra::basis_vector(int a) const {
  Vec v = Vec::Zero(dim());
  v(a) = 1.0;
  return v;
}

Vec LieAlgebra::bracket(const Vec& x, const Vec& y) const { return ad(x) * y; }

Mat LieAlgebra::ad(const Vec& x) const {
  const int n = dim();
  Mat m = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    if (x(a) != cplx{}) m += x(a) * ad_basis_[static_cast<std::size_t>(a)];
  }
  return m;
}

double relative_min_singular(const Mat& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) / std::max(1.0, sv(0));
}

Mat dual_basis(const LieAlgebra& algebra, const Mat& subspace, double tol) {
  const Mat g = algebra.gram(subspace);
  const double s = relative_min_singular(g);
  if (s <= tol) {
    throw Error(ErrorKind::DegenerateRestriction,
                "form restricted to subspace is degenerate (relative smallest singular value " + std::to_string(s) + ")");
  }
  return subspace * g.fullPivLu().inverse();
}

Mat coordinate_subspace(int dim, const std::vector<int>& indices) {
  Mat v = Mat::Zero(dim, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] < 0 || indices[j] >= dim) throw Error(ErrorKind::BadParams, "basis index out of range");
    v(indices[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return v;
}

CanonicalTensors canonical_tensors(const LieAlgebra& algebra) {
  const int n = algebra.dim();
  const Mat& g = algebra.form_inverse();
  CanonicalTensors out{g, Tensor3(n)};
  // f_hat^{nu mu gamma} = sum_{alpha,beta} G_{nu alpha} G_{mu beta} f_{alpha beta}^gamma
  for (int nu = 0; nu < n; ++nu) {
    for (int mu = 0; mu < n; ++mu) {
      for (int ga = 0; ga < n; ++ga) {
        cplx s{};
        for (int al = 0; al < n; ++al) {
          if (g(nu, al) == cplx{}) continue;
          for (int be = 0; be < n; ++be) s += g(nu, al) * g(mu, be) * algebra.f(al, be, ga);
        }
        out.bracket(nu, mu, ga) = s;
      }
    }
  }
  return out;
}

}  // namespace drm
