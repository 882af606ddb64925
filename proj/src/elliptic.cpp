#include "drm/elliptic.hpp"

#include <cmath>
#include <sstream>

#include "drm/error.hpp"

namespace drm {

namespace {

constexpr cplx kI{0.0, 1.0};

// distance from u to the lattice Z + tau Z, optionally skipping the origin
double lattice_distance(cplx u, cplx tau, bool skip_origin) {
  const double n0 = std::round(u.imag() / tau.imag());
  double best = std::numeric_limits<double>::infinity();
  for (double n = n0 - 1; n <= n0 + 1; n += 1.0) {
    const cplx v = u - n * tau;
    const double m0 = std::round(v.real());
    for (double m = m0 - 1; m <= m0 + 1; m += 1.0) {
      if (skip_origin && n == 0.0 && m == 0.0) continue;
      best = std::min(best, std::abs(v - m));
    }
  }
  return best;
}

cplx chi_raw(int a, int N, cplx w, cplx z, const ThetaParams& p) {
  const cplx u = w / kTwoPiI + static_cast<double>(a) * p.tau / static_cast<double>(N);
  cplx v = theta1(u + z, p) * theta1_prime0(p) / (theta1(z, p) * theta1(u, p)) / kTwoPiI;
  if (a == 0) v -= 1.0 / w;
  return std::exp(kTwoPiI * (static_cast<double>(a) * z / static_cast<double>(N))) * v;
}

}  // namespace

void validate(const ThetaParams& p) {
  if (!(p.tau.imag() > 0.0) || !std::isfinite(p.tau.real())) {
    std::ostringstream os;
    os << "Im tau must be positive, got tau = " << p.tau.real() << (p.tau.imag() < 0 ? "" : "+") << p.tau.imag() << "i";
    throw Error(ErrorKind::BadTau, os.str());
  }
  if (p.series_terms < 0) throw Error(ErrorKind::BadParams, "series_terms must be >= 0");
}

cplx theta1(cplx z, const ThetaParams& p) {
  validate(p);
  const double decay = std::abs(z.imag()) / p.tau.imag() + 1.0;
  const int cap = p.series_terms > 0 ? p.series_terms : 100000;
  cplx sum{};
  for (int n = 0; n < cap; ++n) {
    const double h = n + 0.5;
    const cplx e = kI * kPi * p.tau * (h * h);
    const cplx arg = kI * (2.0 * n + 1.0) * kPi * z;
    // q^{h^2} sin((2n+1) pi z), combined so that neither factor overflows
    const cplx term = (n % 2 == 0 ? 1.0 : -1.0) * (std::exp(e + arg) - std::exp(e - arg)) / (2.0 * kI);
    sum += term;
    if (p.series_terms == 0 && h > decay && std::abs(term) <= p.tol * std::max(std::abs(sum), 1e-300)) break;
  }
  return 2.0 * sum;
}

cplx theta1_prime0(const ThetaParams& p) {
  validate(p);
  const int cap = p.series_terms > 0 ? p.series_terms : 100000;
  cplx sum{};
  for (int n = 0; n < cap; ++n) {
    const double h = n + 0.5;
    const cplx term = (n % 2 == 0 ? 1.0 : -1.0) * (2.0 * n + 1.0) * std::exp(kI * kPi * p.tau * (h * h));
    sum += term;
    if (p.series_terms == 0 && std::abs(term) <= p.tol * std::abs(sum)) break;
  }
  return 2.0 * kPi * sum;
}

double chi_pole_distance(int a, int N, cplx w, const ThetaParams& p) {
  const cplx u = w / kTwoPiI + static_cast<double>(a) * p.tau / static_cast<double>(N);
  return 2.0 * kPi * lattice_distance(u, p.tau, a == 0);
}

cplx chi(int a, int N, cplx w, cplx z, const ThetaParams& p, double margin) {
  validate(p);
  if (N < 1 || a < 0 || a >= N) throw Error(ErrorKind::BadParams, "chi needs 0 <= a < N");
  if (lattice_distance(z, p.tau, false) <= margin) throw Error(ErrorKind::PoleProximity, "theta_1(z|tau) vanishes at z");
  if (chi_pole_distance(a, N, w, p) <= margin) throw Error(ErrorKind::PoleProximity, "chi evaluated at a pole in w");
  if (a != 0 || std::abs(w) >= 1e-3) return chi_raw(a, N, w, z, p);
  // removable singularity at w = 0: mean value over a circle around w
  const double rho = 0.25 * std::min(1.0, chi_pole_distance(0, N, cplx{}, p));
  constexpr int kNodes = 64;
  cplx acc{};
  for (int j = 0; j < kNodes; ++j) acc += chi_raw(0, N, w + std::polar(rho, 2.0 * kPi * j / kNodes), z, p);
  return acc / static_cast<double>(kNodes);
}

HoloFunc chi_function(int a, int N, cplx z, const ThetaParams& p) {
  HoloFunc h;
  h.id = FuncId::Chi;
  h.name = "chi_" + std::to_string(a);
  h.value = [=](cplx w) { return chi(a, N, w, z, p, 0.0); };
  h.pole_distance = [=](cplx w) { return chi_pole_distance(a, N, w, p); };
  return h;
}

EllipticR elliptic_R(const TwistedGrading& g, const Vec& omega, cplx z, const ThetaParams& p,
                     const FuncalcOptions& opts) {
  validate(p);
  validate(g, AffineElement{{{0, omega}}, {}, {}});
  if (lattice_distance(z, p.tau, false) <= opts.margin) {
    throw Error(ErrorKind::PoleProximity, "theta_1(z|tau) vanishes at z");
  }
  const LieAlgebra& G = g.algebra();
  const int N = g.order();
  AffineKappa kappa;
  kappa.omega = omega;
  kappa.k = 0.0;
  EllipticR out;
  out.op = Mat::Zero(G.dim(), G.dim());
  for (int a = 0; a < N; ++a) {
    if (g.eigenspace_dim(a) == 0) {
      out.blocks.emplace_back(0, 0);
      continue;
    }
    // grade a with k = 0 gives ad omega restricted to G_a
    const Mat ad = ad_kappa_block(g, kappa, a == 0 ? N : a);
    Mat blk = holo_apply(chi_function(a, N, z, p), ad, opts);
    out.op += g.eigenbasis(a) * blk * g.coordinate_map(a);
    out.blocks.push_back(std::move(blk));
  }
  out.tensor = out.op * G.form_inverse();
  return out;
}

double unitarity_residual(const TwistedGrading& g, const Vec& omega, const std::vector<cplx>& zs, const ThetaParams& p,
                          Mat* constant) {
  double worst = 0.0;
  Mat first;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const Mat s = elliptic_R(g, omega, zs[i], p).tensor + elliptic_R(g, omega, -zs[i], p).tensor.transpose();
    if (i == 0) {
      first = s;
      worst = std::max(worst, max_abs(Mat(s - s.transpose())));
    } else {
      worst = std::max(worst, max_abs(Mat(s - first)));
    }
  }
  if (constant) *constant = first;
  return worst;
}

VerificationReport loop_consistency_against(const TwistedGrading& g, const AffineKappa& kappa,
                                            const AffineKappa& reference, const std::vector<int>& modes, double tol,
                                            int nodes, const FuncalcOptions& opts) {
  if (!(kappa.k.real() < 0.0)) {
    throw Error(ErrorKind::BadTau, "loop consistency needs Re k < 0 so that tau = kN/(2 pi i) has Im tau > 0");
  }
  const int N = g.order();
  ThetaParams p;
  p.tau = kappa.k * static_cast<double>(N) / kTwoPiI;
  validate(p);
  const double y0 = -0.5 * p.tau.imag();

  // chi_a(ad omega|G_a, z_j) for every node
  std::vector<std::vector<Mat>> samples(static_cast<std::size_t>(nodes));
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < nodes; ++j) {
    const cplx z{static_cast<double>(N) * j / nodes, y0};
    samples[static_cast<std::size_t>(j)] = elliptic_R(g, kappa.omega, z, p, opts).blocks;
  }

  VerificationReport rep;
  rep.check = "elliptic-consistency";
  rep.tol = tol;
  nlohmann::json per_mode = nlohmann::json::array();
  int idx = 0;
  for (int n : modes) {
    const int a = g.residue(n);
    const int m = g.eigenspace_dim(a);
    if (m == 0) continue;
    Mat coeff = Mat::Zero(m, m);
    for (int j = 0; j < nodes; ++j) {
      const cplx z{static_cast<double>(N) * j / nodes, y0};
      coeff += samples[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] *
               std::exp(-kTwoPiI * (static_cast<double>(n) * z / static_cast<double>(N)));
    }
    coeff /= static_cast<double>(nodes);
    Mat target = affine_R_block(g, reference, n, opts).topLeftCorner(m, m);
    target += 0.5 * Mat::Identity(m, m);
    const double res = max_abs(Mat(coeff - target));
    rep.points.push_back({idx++, kappa.omega, res});
    per_mode.push_back({{"mode", n}, {"residual", res}});
  }
  rep.meta["tau"] = {p.tau.real(), p.tau.imag()};
  rep.meta["k"] = {kappa.k.real(), kappa.k.imag()};
  rep.meta["nodes"] = nodes;
  rep.meta["modes"] = per_mode;
  rep.meta["compared_with"] = "R + I/2";
  rep.meta["rescale"] = 1.0;
  rep.finalize();
  return rep;
}

VerificationReport loop_consistency(const TwistedGrading& g, const AffineKappa& kappa, const std::vector<int>& modes,
                                    double tol, int nodes, const FuncalcOptions& opts) {
  return loop_consistency_against(g, kappa, kappa, modes, tol, nodes, opts);
}

nlohmann::json elliptic_json(const TwistedGrading& g, const Vec& omega, cplx z, const ThetaParams& p,
                             const EllipticR& r) {
  nlohmann::json blocks = nlohmann::json::object();
  for (std::size_t a = 0; a < r.blocks.size(); ++a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.blocks[a].rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < r.blocks[a].cols(); ++j) row.push_back({r.blocks[a](i, j).real(), r.blocks[a](i, j).imag()});
      rows.push_back(row);
    }
    blocks[std::to_string(a)] = rows;
  }
  return {{"schema_version", 1},
          {"omega", complex_vector_json(omega)},
          {"z", {z.real(), z.imag()}},
          {"tau", {p.tau.real(), p.tau.imag()}},
          {"N", g.order()},
          {"blocks", blocks}};
}

}  // namespace drm
