#include "drm/funcalc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "drm/error.hpp"

namespace drm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double no_poles(cplx) { return kInf; }

std::vector<cplx> eigenvalues_of(const Mat& M) {
  if (M.rows() == 0) return {};
  Eigen::ComplexEigenSolver<Mat> es(M, false);
  std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

double pole_distance_of(const HoloFunc& h, cplx z) { return h.pole_distance ? h.pole_distance(z) : kInf; }

struct Cluster {
  cplx center;
  double inner = 0.0;  // radius containing the members
  double outer = kInf;  // distance to other eigenvalues and poles
};

// Single-linkage grouping of eigenvalues; members closer than `link` merge.
std::vector<Cluster> cluster_spectrum(const HoloFunc& h, const std::vector<cplx>& ev) {
  const std::size_t n = ev.size();
  double scale = 1.0;
  for (cplx z : ev) scale = std::max(scale, std::abs(z));
  const double link = 1e-3 * scale;

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(ev[i] - ev[j]) < link) parent[find(i)] = find(j);
    }
  }

  std::vector<Cluster> out;
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  for (const auto& g : groups) {
    if (g.empty()) continue;
    Cluster c;
    for (std::size_t i : g) c.center += ev[i];
    c.center /= static_cast<double>(g.size());
    for (std::size_t i : g) c.inner = std::max(c.inner, std::abs(ev[i] - c.center));
    for (std::size_t j = 0; j < n; ++j) {
      if (std::find(g.begin(), g.end(), j) == g.end()) c.outer = std::min(c.outer, std::abs(ev[j] - c.center));
    }
    c.outer = std::min(c.outer, pole_distance_of(h, c.center));
    out.push_back(c);
  }
  return out;
}

// One circle around the whole spectrum when it sits well inside the
// pole-free disc (fast and far from the eigenvalues), else one per cluster.
std::vector<Cluster> contour_circles(const HoloFunc& h, const std::vector<cplx>& ev) {
  if (ev.empty()) return {};
  Cluster all;
  for (cplx z : ev) all.center += z;
  all.center /= static_cast<double>(ev.size());
  for (cplx z : ev) all.inner = std::max(all.inner, std::abs(z - all.center));
  all.outer = pole_distance_of(h, all.center);
  if (all.inner <= 0.25 * all.outer) return {all};
  return cluster_spectrum(h, ev);
}

// (1/N) sum_j h(z_j) (z_j - c) (z_j - M)^{-1} on a circle |z - c| = r.
Mat circle_sum(const HoloFunc& h, const Mat& M, cplx c, double r, int nodes) {
  const Eigen::Index n = M.rows();
  Mat acc = Mat::Zero(n, n);
  const Mat I = Mat::Identity(n, n);
  for (int j = 0; j < nodes; ++j) {
    const cplx u = std::polar(r, 2.0 * kPi * (j + 0.5) / nodes);
    const cplx z = c + u;
    acc += (h.value(z) * u) * (z * I - M).partialPivLu().inverse();
  }
  return acc / static_cast<double>(nodes);
}

Mat contour_apply(const HoloFunc& h, const Mat& M, const std::vector<cplx>& ev, const FuncalcOptions& opts) {
  const Eigen::Index n = M.rows();
  Mat total = Mat::Zero(n, n);
  for (const Cluster& cl : contour_circles(h, ev)) {
    double outer = cl.outer;
    if (!std::isfinite(outer)) outer = std::max(1.0, 4.0 * cl.inner);
    if (outer <= 1.2 * cl.inner) {
      throw Error(ErrorKind::IllConditioned, "eigenvalue cluster cannot be separated from the rest of the spectrum or a pole");
    }
    const double inner = std::max(cl.inner, 0.05 * outer);
    const double r = std::sqrt(inner * outer);

    Mat prev = circle_sum(h, M, cl.center, r, 32);
    bool converged = false;
    double last_diff = kInf;
    for (int nodes = 64; nodes <= opts.max_nodes; nodes *= 2) {
      Mat cur = circle_sum(h, M, cl.center, r, nodes);
      const double diff = max_abs(Mat(cur - prev));
      prev = std::move(cur);
      const double s = std::max(1.0, max_abs(prev));
      // the trapezoid error decays geometrically; a diff that stops shrinking
      // is the rounding floor of the resolvent solves
      const bool at_floor = nodes >= 256 && diff > 0.25 * last_diff && diff <= opts.contour_floor * s;
      if (diff <= opts.contour_tol * s || at_floor) {
        converged = true;
        break;
      }
      last_diff = diff;
    }
    if (!converged) throw Error(ErrorKind::IllConditioned, "contour quadrature did not converge");
    total += prev;
  }
  return total;
}

void require_admissible(const HoloFunc& h, const std::vector<cplx>& ev, double margin) {
  for (cplx z : ev) {
    const double d = pole_distance_of(h, z);
    if (d <= margin) {
      std::ostringstream os;
      os << h.name << ": eigenvalue " << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i is within " << d
         << " of a pole";
      throw Error(ErrorKind::InadmissibleSpectrum, os.str());
    }
  }
}

struct EigenData {
  Mat V, Vinv;
  Vec lambda;
  double cond = kInf;
};

EigenData eigen_data(const Mat& M) {
  EigenData d;
  Eigen::ComplexEigenSolver<Mat> es(M);
  d.V = es.eigenvectors();
  d.lambda = es.eigenvalues();
  Eigen::JacobiSVD<Mat> svd(d.V);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) > 0.0) d.cond = s(0) / s(s.size() - 1);
  if (std::isfinite(d.cond)) d.Vinv = d.V.partialPivLu().inverse();
  return d;
}

bool use_eigen(const EigenData& d, const FuncalcOptions& opts) {
  if (opts.path == FuncalcPath::Eigen) return true;
  if (opts.path == FuncalcPath::Contour) return false;
  return d.cond < opts.eig_cond_max;
}

// Exact for diagonal input: skip the eigensolver so rounding in V cannot leak in.
bool is_diagonal(const Mat& M) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if (i != j && M(i, j) != cplx{}) return false;
    }
  }
  return true;
}

}  // namespace

cplx f_value(cplx z) {
  if (std::abs(z) < 1e-3) {
    const cplx z2 = z * z;
    // B_2k z^{2k-1}/(2k)!
    return z * (1.0 / 12.0 + z2 * (-1.0 / 720.0 + z2 * (1.0 / 30240.0 + z2 * (-1.0 / 1209600.0))));
  }
  return 0.5 / std::tanh(0.5 * z) - 1.0 / z;
}

cplx F_value(cplx z) { return 0.5 / std::tanh(0.5 * z); }

cplx F_derivative(cplx z) {
  const cplx s = std::sinh(0.5 * z);
  return -0.25 / (s * s);
}

cplx f_derivative(cplx z) {
  if (std::abs(z) < 1e-3) {
    const cplx z2 = z * z;
    return 1.0 / 12.0 + z2 * (-3.0 / 720.0 + z2 * (5.0 / 30240.0 + z2 * (-7.0 / 1209600.0)));
  }
  return F_derivative(z) + 1.0 / (z * z);
}

double distance_to_lattice(cplx z, bool skip_zero) {
  const double step = 2.0 * kPi;
  const double n0 = std::round(z.imag() / step);
  double best = kInf;
  for (double n = n0 - 1; n <= n0 + 1; n += 1.0) {
    if (skip_zero && n == 0.0) continue;
    best = std::min(best, std::abs(z - cplx{0.0, n * step}));
  }
  return best;
}

HoloFunc HoloFunc::f() {
  return {FuncId::f, "f", f_value, [](cplx z) { return distance_to_lattice(z, true); }, f_derivative};
}

HoloFunc HoloFunc::F() {
  return {FuncId::F, "F", F_value, [](cplx z) { return distance_to_lattice(z, false); }, F_derivative};
}

HoloFunc HoloFunc::custom(std::string name, std::function<cplx(cplx)> value, std::function<double(cplx)> pole_distance,
                          std::function<cplx(cplx)> derivative) {
  if (!pole_distance) pole_distance = no_poles;
  return {FuncId::Custom, std::move(name), std::move(value), std::move(pole_distance), std::move(derivative)};
}

cplx eval_scalar(const HoloFunc& h, cplx z, double margin) {
  const double d = pole_distance_of(h, z);
  if (d <= margin) {
    std::ostringstream os;
    os << h.name << " evaluated within " << d << " of a pole";
    throw Error(ErrorKind::PoleProximity, os.str());
  }
  return h.value(z);
}

SpectralReport spectrum_check(const HoloFunc& h, const Mat& M, double margin) {
  SpectralReport rep;
  rep.margin = margin;
  rep.eigenvalues = eigenvalues_of(M);
  for (cplx z : rep.eigenvalues) rep.min_pole_distance = std::min(rep.min_pole_distance, pole_distance_of(h, z));
  rep.admissible = rep.min_pole_distance > margin;
  return rep;
}

Mat holo_apply(const HoloFunc& h, const Mat& M, const FuncalcOptions& opts, FuncalcPath* used) {
  if (M.rows() != M.cols()) throw Error(ErrorKind::BadParams, "holo_apply needs a square matrix");
  const Eigen::Index n = M.rows();
  if (n == 0) return Mat(0, 0);

  if (is_diagonal(M) && opts.path != FuncalcPath::Contour) {
    std::vector<cplx> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = M(i, i);
    require_admissible(h, ev, opts.margin);
    Mat out = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) out(i, i) = h.value(M(i, i));
    if (used) *used = FuncalcPath::Eigen;
    return out;
  }

  const EigenData d = eigen_data(M);
  std::vector<cplx> ev(d.lambda.data(), d.lambda.data() + d.lambda.size());
  require_admissible(h, ev, opts.margin);

  if (use_eigen(d, opts)) {
    if (!std::isfinite(d.cond)) throw Error(ErrorKind::IllConditioned, "eigenvector matrix is singular");
    Vec hv(n);
    for (Eigen::Index i = 0; i < n; ++i) hv(i) = h.value(d.lambda(i));
    if (used) *used = FuncalcPath::Eigen;
    return d.V * hv.asDiagonal() * d.Vinv;
  }
  if (used) *used = FuncalcPath::Contour;
  return contour_apply(h, M, ev, opts);
}

cplx divided_difference(const HoloFunc& h, cplx a, cplx b) {
  const cplx mid = 0.5 * (a + b);
  const double gap = std::abs(a - b);
  const double scale = std::max(1.0, std::abs(mid));
  if (gap > 1e-4 * scale) return (h.value(a) - h.value(b)) / (a - b);

  const double r = 0.5 * std::min(scale, pole_distance_of(h, mid));
  if (r <= 4.0 * gap) {
    if (h.derivative) return h.derivative(mid);
    return (h.value(a) - h.value(b)) / (a - b);
  }
  // (1/2 pi i) \oint h(z) / ((z - a)(z - b)) dz
  constexpr int kNodes = 64;
  cplx acc{};
  for (int j = 0; j < kNodes; ++j) {
    const cplx u = std::polar(r, 2.0 * kPi * (j + 0.5) / kNodes);
    const cplx z = mid + u;
    acc += h.value(z) * u / ((z - a) * (z - b));
  }
  return acc / static_cast<double>(kNodes);
}

Mat holo_frechet(const HoloFunc& h, const Mat& M, const Mat& E, const FuncalcOptions& opts) {
  const Eigen::Index n = M.rows();
  if (n == 0) return Mat(0, 0);
  const EigenData d = eigen_data(M);
  std::vector<cplx> ev(d.lambda.data(), d.lambda.data() + d.lambda.size());
  require_admissible(h, ev, opts.margin);

  if (use_eigen(d, opts) && std::isfinite(d.cond)) {
    Mat Et = d.Vinv * E * d.V;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) Et(i, j) *= divided_difference(h, d.lambda(i), d.lambda(j));
    }
    return d.V * Et * d.Vinv;
  }

  // h([[M, E], [0, M]]) = [[h(M), L(M, E)], [0, h(M)]]
  Mat big = Mat::Zero(2 * n, 2 * n);
  big.topLeftCorner(n, n) = M;
  big.topRightCorner(n, n) = E;
  big.bottomRightCorner(n, n) = M;
  std::vector<cplx> ev2 = ev;
  ev2.insert(ev2.end(), ev.begin(), ev.end());
  return contour_apply(h, big, ev2, opts).topRightCorner(n, n);
}

Mat f_taylor(const Mat& M, double tol) {
  const Eigen::Index n = M.rows();
  const auto ev = eigenvalues_of(M);
  double rho = 0.0;
  for (cplx z : ev) rho = std::max(rho, std::abs(z));
  if (rho >= 2.0 * kPi * 0.95) throw Error(ErrorKind::IllConditioned, "Taylor series of f needs spectral radius below 2 pi");

  const Mat M2 = M * M;
  Mat power = M;  // M^{2k-1}
  Mat sum = Mat::Zero(n, n);
  int quiet = 0;
  for (int k = 1; k <= 4000; ++k) {
    // B_2k/(2k)! = (-1)^{k+1} 2 zeta(2k) / (2 pi)^{2k}
    double zeta = 0.0;
    if (k == 1) {
      zeta = kPi * kPi / 6.0;
    } else if (k == 2) {
      zeta = std::pow(kPi, 4) / 90.0;
    } else if (k < 30) {
      for (int m = 1000; m >= 1; --m) zeta += std::pow(static_cast<double>(m), -2.0 * k);
    } else {
      zeta = 1.0 + std::pow(2.0, -2.0 * k);
    }
    const double coeff = (k % 2 == 1 ? 2.0 : -2.0) * zeta * std::pow(2.0 * kPi, -2.0 * k);
    const Mat term = coeff * power;
    sum += term;
    if (max_abs(term) <= tol * std::max(1.0, max_abs(sum))) {
      if (++quiet >= 3) return sum;
    } else {
      quiet = 0;
    }
    power = power * M2;
  }
  throw Error(ErrorKind::IllConditioned, "Taylor series of f did not converge");
}

}  // namespace drm
