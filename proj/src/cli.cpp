#include "drm/cli.hpp"

#include <cmath>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drm/affine.hpp"
#include "drm/catalog.hpp"
#include "drm/cdybe.hpp"
#include "drm/chain.hpp"
#include "drm/drmatrix.hpp"
#include "drm/elliptic.hpp"
#include "drm/error.hpp"
#include "drm/io.hpp"

namespace drm {

namespace {

using nlohmann::json;

constexpr double kSampleRadius = 0.05;

struct Globals {
  double tol = -1.0;  // < 0: per-suite default
  std::uint64_t seed = 7;
  int samples = 5;
  std::string out;
};

struct AlgebraChoice {
  std::string catalog;
  std::string file;
  int n = 0;
  int d = 0;
  double p = 0.0;
};

struct Loaded {
  std::shared_ptr<const LieAlgebra> A;
  std::string name;
  std::string family;
};

struct ChainChoice {
  std::string K;
  std::string L;
};

struct ResolvedChain {
  std::shared_ptr<const Chain> chain;
  std::string name;
  std::string K;
  std::string L;  // "all" when L = A
};

struct FieldChoice {
  std::string construction;
  int sign = 1;
};

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::BadParams, what); }

void add_algebra_options(CLI::App* cmd, AlgebraChoice& c, bool allow_file) {
  cmd->add_option("--catalog,--G", c.catalog, "catalog algebra: sl2, sl3, sl (with --n), e_selfdual (with --d), oscillator(1), ...");
  if (allow_file) cmd->add_option("--file", c.file, "algebra description JSON file");
  cmd->add_option("--n", c.n, "sl(n) size or oscillator mode count");
  cmd->add_option("--d", c.d, "e_selfdual dimension d");
  cmd->add_option("--p", c.p, "e_selfdual form parameter");
}

void add_chain_options(CLI::App* cmd, ChainChoice& c) {
  cmd->add_option("--K", c.K, "dynamical subalgebra: cartan, levi, JT, Nc, all or a comma-separated label list");
  cmd->add_option("--L", c.L, "intermediate subalgebra (default: the whole algebra)");
}

std::string family_of(std::string_view name) {
  for (const char* f : {"sl", "e_selfdual", "oscillator"}) {
    if (name.rfind(f, 0) == 0) return f;
  }
  return "other";
}

Loaded load_algebra(const AlgebraChoice& c, const std::string& fallback) {
  if (!c.file.empty() && !c.catalog.empty()) bad("give either --catalog or --file, not both");
  if (!c.file.empty()) {
    AlgebraData d = read_algebra_file(c.file);
    auto A = std::make_shared<const LieAlgebra>(LieAlgebra::build(std::move(d.f), std::move(d.form), std::move(d.labels)));
    return {A, "file:" + c.file, "file"};
  }
  const std::string name = c.catalog.empty() ? fallback : c.catalog;
  if (name.empty()) bad("an algebra is required (--catalog or --file)");
  CatalogParams params;
  if (c.n > 0) params.n = c.n;
  if (c.d > 0) params.d = c.d;
  params.p = c.p;
  auto A = std::make_shared<const LieAlgebra>(catalog(name, params));
  const std::string fam = family_of(name);
  std::ostringstream os;
  if (fam == "sl") {
    os << "sl(" << std::lround(std::sqrt(A->dim() + 1.0)) << ")";
  } else if (fam == "e_selfdual") {
    os << "e_selfdual(d=" << std::lround(std::sqrt(static_cast<double>(A->dim()))) << ",p=" << c.p << ")";
  } else if (fam == "oscillator") {
    os << "oscillator(" << (A->dim() - 2) / 2 << ")";
  } else {
    os << name;
  }
  return {A, os.str(), fam};
}

std::string default_K(const Loaded& a) {
  if (a.family == "sl") return "cartan";
  if (a.family == "e_selfdual") return "JT";
  if (a.family == "oscillator") return "Nc";
  return "all";
}

ResolvedChain resolve_chain(const Loaded& a, const ChainChoice& c) {
  ResolvedChain rc;
  rc.K = c.K.empty() ? default_K(a) : c.K;
  rc.L = c.L.empty() ? "all" : c.L;
  const std::vector<int> Ki = named_indices(*a.A, rc.K);
  const std::vector<int> Li = rc.L == "all" ? std::vector<int>{} : named_indices(*a.A, rc.L);
  rc.chain = std::make_shared<const Chain>(make_chain(a.A, Ki, Li));
  rc.name = rc.K + " < " + (rc.L == "all" ? std::string("A") : rc.L + " < A");
  return rc;
}

void require_even_complement(const ResolvedChain& rc, const Loaded& a) {
  const int m = rc.chain->nM();
  if (m % 2 == 0) return;
  const std::string why = a.family == "e_selfdual" ? "odd d" : "odd dim M";
  throw Error(ErrorKind::SingularC, "C(kappa) is antisymmetric of odd size " + std::to_string(m) +
                                        ": SingularC everywhere (" + why + ")");
}

bool in_span(const Mat& basis, const Vec& x) {
  if (basis.cols() == 0) return x.norm() == 0.0;
  const Vec c = basis.colPivHouseholderQr().solve(x);
  return (basis * c - x).norm() <= 1e-12 * std::max(1.0, x.norm());
}

Vec sl_regular_element(int n) {
  double mean_sq = 0.0;
  for (int j = 0; j < n; ++j) mean_sq += static_cast<double>(j) * j;
  mean_sq /= n;
  Mat X = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) X(j, j) = 0.5 * ((n - 1) / 2.0 - j) + 0.04 * (j * j - mean_sq);
  return sl_coordinates(X);
}

Vec default_center(const Loaded& a, const Chain& ch) {
  const LieAlgebra& A = *a.A;
  std::vector<Vec> candidates;
  if (a.family == "sl") candidates.push_back(sl_regular_element(static_cast<int>(std::lround(std::sqrt(A.dim() + 1.0)))));
  if (a.family == "e_selfdual") {
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(A.dim()))));
    if (d % 2 == 0) candidates.push_back(0.1 * e_selfdual_kappa0(A, d));
  }
  if (a.family == "oscillator") {
    const auto N = A.index_of("N"), c = A.index_of("c");
    if (N && c) candidates.push_back(0.3 * A.basis_vector(*N) + 0.2 * A.basis_vector(*c));
  }
  for (const Vec& v : candidates) {
    if (in_span(ch.K(), v)) return v;
  }
  Vec v = Vec::Zero(A.dim());
  double w = 0.3;
  for (int i = 0; i < ch.nK(); ++i, w *= 0.57) v += w * ch.K().col(i);
  return v;
}

Vec resolve_kappa(const std::string& text, const Loaded& a, const Chain& ch, const Mat& dyn_basis) {
  const Vec k = text.empty() ? default_center(a, ch) : parse_kappa(*a.A, text);
  if (!in_span(dyn_basis, k)) bad("kappa must lie in the dynamical subalgebra");
  return k;
}

const std::set<std::string>& construction_names() {
  static const std::set<std::string> names{"canonical", "reduced-canonical", "reduced", "dirac", "trig", "rational", "zero"};
  return names;
}

FieldChoice parse_construction(std::string name, const std::string& sign_text) {
  FieldChoice fc;
  if (!name.empty() && (name.back() == '+' || name.back() == '-')) {
    fc.sign = name.back() == '-' ? -1 : 1;
    name.pop_back();
  }
  if (!sign_text.empty()) {
    if (sign_text == "+" || sign_text == "plus" || sign_text == "1" || sign_text == "+1") {
      fc.sign = 1;
    } else if (sign_text == "-" || sign_text == "minus" || sign_text == "-1") {
      fc.sign = -1;
    } else {
      bad("--sign must be + or -");
    }
  }
  if (!construction_names().count(name)) throw Error(ErrorKind::UnknownName, "unknown construction \"" + name + "\"");
  fc.construction = name;
  return fc;
}

bool uses_chain(const FieldChoice& fc) { return fc.construction != "canonical" && fc.construction != "zero"; }

std::string field_label(const FieldChoice& fc) {
  const bool signed_kind = fc.construction == "canonical" || fc.construction == "reduced-canonical" ||
                           fc.construction == "reduced" || fc.construction == "trig";
  return fc.construction + (signed_kind ? (fc.sign > 0 ? "+" : "-") : "");
}

// field on A for "canonical" or "zero"
RMatrixField base_field(const FieldChoice& fc, const Loaded& a) {
  if (fc.construction == "canonical") return canonical_r(a.A, fc.sign);
  if (fc.construction == "zero") return zero_field(a.A, Mat::Identity(a.A->dim(), a.A->dim()));
  bad("this suite needs --r canonical+, canonical- or zero as the field on L");
}

// the base field reduced to L when L != A
RMatrixField l_field(const FieldChoice& fc, const Loaded& a, const ResolvedChain& rc) {
  RMatrixField r = base_field(fc, a);
  if (rc.L == "all") return r;
  auto to_L = std::make_shared<const Chain>(make_chain(a.A, named_indices(*a.A, rc.L)));
  return reduce(r, to_L);
}

RMatrixField build_field(const FieldChoice& fc, const Loaded& a, const ResolvedChain& rc) {
  const std::string& c = fc.construction;
  if (c == "canonical" || c == "zero") return base_field(fc, a);
  if (c == "reduced-canonical") {
    if (rc.L != "all") bad("reduced-canonical needs L = A");
    return reduced_canonical(rc.chain, fc.sign);
  }
  if (c == "reduced") return reduce(l_field({"canonical", fc.sign}, a, rc), rc.chain);
  if (c == "dirac") return dirac_field(rc.chain);
  if (c == "trig") return trig_cartan(rc.chain, fc.sign);
  return rational_cartan(rc.chain);
}

DerivMode parse_deriv(const std::string& s) {
  if (s == "fd") return DerivMode::FiniteDifference;
  if (s == "exact") return DerivMode::Exact;
  if (s == "auto") return DerivMode::Auto;
  bad("--deriv must be fd, exact or auto");
}

double suite_tol(const Globals& g, DerivMode mode) {
  if (g.tol >= 0.0) return g.tol;
  return mode == DerivMode::FiniteDifference ? 1e-6 : 1e-8;
}

void check_globals(const Globals& g) {
  if (g.samples < 1) bad("--samples must be at least 1");
}

int emit(const json& doc, const Globals& g, std::ostream& out) {
  if (g.out.empty()) {
    out << dump_json(doc);
  } else {
    write_text_file(g.out, dump_json(doc));
  }
  return kExitPass;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_config_error(e.kind()) ? kExitConfigError : kExitMathError;
  } catch (const json::exception& e) {
    err << "error: Parse: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitMathError;
  }
}

// ---- algebra ----

json axioms_json(const AxiomReport& r, const std::vector<std::string>& labels) {
  auto name = [&](int i) { return i >= 0 && i < static_cast<int>(labels.size()) ? labels[static_cast<std::size_t>(i)] : std::string("-"); };
  return {{"antisymmetry", {{"residual", r.antisymmetry}, {"at", {name(r.antisymmetry_at[0]), name(r.antisymmetry_at[1]), name(r.antisymmetry_at[2])}}}},
          {"jacobi",
           {{"residual", r.jacobi},
            {"at", {name(r.jacobi_at[0]), name(r.jacobi_at[1]), name(r.jacobi_at[2])}},
            {"component", name(r.jacobi_at[3])}}},
          {"invariance", {{"residual", r.invariance}, {"at", {name(r.invariance_at[0]), name(r.invariance_at[1]), name(r.invariance_at[2])}}}},
          {"form_singular_values", {{"min", r.min_singular}, {"max", r.max_singular}}},
          {"structure_scale", r.structure_scale},
          {"form_scale", r.form_scale}};
}

int cmd_algebra_validate(const AlgebraChoice& c, const Globals& g, std::ostream& out, std::ostream& err) {
  const double tol = g.tol >= 0.0 ? g.tol : 1e-10;
  AlgebraData data;
  std::string source;
  if (!c.file.empty() && !c.catalog.empty()) bad("give either --catalog or --file, not both");
  if (!c.file.empty()) {
    data = read_algebra_file(c.file);
    source = "file:" + c.file;
  } else {
    const Loaded a = load_algebra(c, "");
    data = algebra_data(*a.A);
    source = a.name;
  }
  if (data.labels.empty()) {
    for (int i = 0; i < data.f.dim(); ++i) data.labels.push_back("T" + std::to_string(i));
  }
  const AxiomReport rep = check_axioms(data.f, data.form);
  std::string error;
  try {
    (void)LieAlgebra::build(data.f, data.form, data.labels, tol);
  } catch (const Error& e) {
    if (is_config_error(e.kind())) throw;
    error = e.what();
  }
  json doc = {{"schema_version", 1},
              {"command", "algebra validate"},
              {"config", {{"source", source}, {"tol", tol}}},
              {"dim", data.f.dim()},
              {"labels", data.labels},
              {"axioms", axioms_json(rep, data.labels)},
              {"pass", error.empty()}};
  if (!error.empty()) doc["error"] = error;
  emit(doc, g, out);
  if (!error.empty()) {
    err << "error: " << error << "\n";
    return kExitMathError;
  }
  return kExitPass;
}

int cmd_algebra_export(const AlgebraChoice& c, const Globals& g, std::ostream& out) {
  const Loaded a = load_algebra(c, "");
  json doc = algebra_to_json(*a.A);
  doc["name"] = a.name;
  return emit(doc, g, out);
}

// ---- rmatrix ----

struct RmatrixArgs {
  std::string construction;
  std::string sign;
  std::string kappa;
};

int cmd_rmatrix(const AlgebraChoice& ac, const ChainChoice& cc, const RmatrixArgs& args, const Globals& g,
                std::ostream& out) {
  const Loaded a = load_algebra(ac, "");
  const FieldChoice fc = parse_construction(args.construction, args.sign);
  const ResolvedChain rc = resolve_chain(a, cc);
  if (uses_chain(fc)) require_even_complement(rc, a);
  const RMatrixField r = build_field(fc, a, rc);
  const Vec kappa = resolve_kappa(args.kappa, a, *rc.chain, r.dyn_basis);
  (void)r.eval(kappa);  // domain errors surface here

  json flags = {{"in_domain", true}};
  flags["ad_kappa_min_pole_distance_f"] = spectrum_check(HoloFunc::f(), a.A->ad(kappa), 0.0).min_pole_distance;
  if (uses_chain(fc) && rc.chain->nM() > 0) {
    flags["c_matrix_rel_min_singular"] = relative_min_singular(c_matrix(*rc.chain, kappa));
  }
  json doc = rmatrix_export(r, kappa, a.name, uses_chain(fc) ? rc.name : "L = A", flags);
  doc["config"] = {{"algebra", a.name},
                   {"construction", field_label(fc)},
                   {"K", uses_chain(fc) ? rc.K : "all"},
                   {"L", rc.L},
                   {"kappa", args.kappa.empty() ? "default" : args.kappa}};
  if (!g.out.empty()) out << "domain_flags " << flags.dump() << "\n";
  return emit(doc, g, out);
}

// ---- verify ----

struct VerifyArgs {
  std::string suite;
  std::string r = "canonical+";
  std::string kappa;
  std::string deriv = "fd";
  std::string mu = "id";
  std::string omega;
  std::string k = "-1";
  std::string l = "0";
  int window = 3;
  int pairs = 50;
  int modes = 3;
  int nodes = 512;
};

struct SuiteOutput {
  std::vector<VerificationReport> reports;
  json config = json::object();
  json skipped = json::array();
};

std::vector<Vec> samples_for(const RMatrixField& r, const Vec& center, const Globals& g) {
  SamplingSpec spec;
  spec.center = center;
  spec.radius = kSampleRadius;
  spec.count = g.samples;
  spec.seed = g.seed;
  return sample_points(r, spec);
}

void tag(VerificationReport& rep, const std::string& algebra, const std::string& chain, std::uint64_t seed) {
  rep.algebra = algebra;
  rep.chain = chain;
  rep.seed = seed;
}

void run_cdybe_like(const std::string& suite, const Loaded& a, const ChainChoice& cc, const VerifyArgs& v,
                    const Globals& g, SuiteOutput& so) {
  const FieldChoice fc = parse_construction(v.r, "");
  const DerivMode mode = parse_deriv(v.deriv);
  const double tol = suite_tol(g, mode);
  const ResolvedChain rc = resolve_chain(a, cc);
  if (uses_chain(fc)) require_even_complement(rc, a);
  const RMatrixField r = build_field(fc, a, rc);
  const Vec center = resolve_kappa(v.kappa, a, *rc.chain, r.dyn_basis);
  const auto pts = samples_for(r, center, g);
  const std::string chain_name = uses_chain(fc) ? rc.name : "L = A";
  if (suite == "cdybe") {
    CdybSuite cs = cdyb_suite(r, pts, tol, mode);
    for (VerificationReport* rep : {&cs.invariance, &cs.constancy}) {
      tag(*rep, a.name, chain_name, g.seed);
      rep->meta["construction"] = field_label(fc);
      so.reports.push_back(*rep);
    }
  } else {
    VerificationReport rep = check_equivariance(r, pts, tol, mode);
    tag(rep, a.name, chain_name, g.seed);
    rep.meta["construction"] = field_label(fc);
    so.reports.push_back(rep);
  }
  so.config[suite] = {{"construction", field_label(fc)}, {"chain", chain_name}, {"center", complex_vector_json(center)},
                      {"radius", kSampleRadius}, {"samples", g.samples}, {"deriv", v.deriv}, {"tol", tol}};
}

void run_prop1(const Loaded& a, const ChainChoice& cc, const VerifyArgs& v, const Globals& g, SuiteOutput& so) {
  const FieldChoice fc = parse_construction(v.r, "");
  const DerivMode mode = parse_deriv(v.deriv);
  const double tol = suite_tol(g, mode);
  const ResolvedChain rc = resolve_chain(a, cc);
  if (rc.chain->nM() == 0) bad("prop1 needs a chain with a nonzero complement M");
  require_even_complement(rc, a);
  const RMatrixField rL = l_field(fc, a, rc);
  const RMatrixField reduced = reduce(rL, rc.chain);
  const Vec center = resolve_kappa(v.kappa, a, *rc.chain, rc.chain->K());
  const auto pts = samples_for(reduced, center, g);
  Prop1Result res = proposition1_suite(rL, rc.chain, pts, tol, mode);
  for (VerificationReport* rep : {&res.dirac_zero, &res.equality, &res.constancy}) {
    tag(*rep, a.name, rc.name, g.seed);
    rep->meta["construction"] = field_label(fc);
    so.reports.push_back(*rep);
  }
  if (rc.L != "all") {
    // reduction in two steps (A -> L -> K) against one step (A -> K)
    auto direct = std::make_shared<const Chain>(make_chain(a.A, named_indices(*a.A, rc.K)));
    const RMatrixField one = reduce(base_field(fc, a), direct);
    VerificationReport rep = run_samples("prop1-two-step", pts, tol, [&](const Vec& k) {
      return max_abs(Mat(reduced.eval(k) - one.eval(k)));
    });
    tag(rep, a.name, rc.name, g.seed);
    so.reports.push_back(rep);
  }
  so.config["prop1"] = {{"construction", field_label(fc)}, {"chain", rc.name}, {"center", complex_vector_json(center)},
                        {"radius", kSampleRadius}, {"samples", g.samples}, {"deriv", v.deriv}, {"tol", tol}};
}

AffineKappa affine_kappa(const TwistedGrading& grading, const Loaded& G, const VerifyArgs& v, const Globals& g) {
  AffineKappa kappa;
  if (v.omega.empty()) {
    kappa.omega = seeded_omega(grading, g.seed);
  } else {
    kappa.omega = parse_kappa(*G.A, v.omega);
    if ((grading.projection(0) * kappa.omega - kappa.omega).norm() > 1e-12 * std::max(1.0, kappa.omega.norm())) {
      bad("--omega must lie in the fixed-point subalgebra G_0");
    }
  }
  kappa.k = parse_complex(v.k);
  kappa.l = parse_complex(v.l);
  return kappa;
}

void run_prop2(const Loaded& G, const VerifyArgs& v, const Globals& g, SuiteOutput& so) {
  if (v.window < 0) bad("--window must be >= 0");
  if (v.pairs < 1) bad("--pairs must be >= 1");
  const double tol = g.tol >= 0.0 ? g.tol : 1e-8;
  const TwistedGrading grading = build_twisted_grading(G.A, named_automorphism(*G.A, v.mu));
  const AffineKappa kappa = affine_kappa(grading, G, v, g);
  VerificationReport rep = verify_prop2(grading, kappa, v.window, v.pairs, g.seed, tol);
  tag(rep, G.name, "mu=" + v.mu, g.seed);
  so.reports.push_back(rep);
  so.config["prop2"] = {{"G", G.name}, {"mu", v.mu}, {"N", grading.order()}, {"window", v.window}, {"pairs", v.pairs},
                        {"omega", complex_vector_json(kappa.omega)}, {"k", {kappa.k.real(), kappa.k.imag()}},
                        {"l", {kappa.l.real(), kappa.l.imag()}}, {"tol", tol}};
}

void run_elliptic(const Loaded& G, const VerifyArgs& v, const Globals& g, SuiteOutput& so) {
  if (v.modes < 0) bad("--modes must be >= 0");
  if (v.nodes < 8) bad("--nodes must be >= 8");
  const double tol = g.tol >= 0.0 ? g.tol : 1e-6;
  const TwistedGrading grading = build_twisted_grading(G.A, named_automorphism(*G.A, v.mu));
  AffineKappa kappa;
  kappa.omega = v.omega.empty() ? Vec(Vec::Zero(G.A->dim())) : parse_kappa(*G.A, v.omega);
  kappa.k = parse_complex(v.k);
  std::vector<int> modes;
  for (int n = -v.modes; n <= v.modes; ++n) modes.push_back(n);
  VerificationReport rep = loop_consistency(grading, kappa, modes, tol, v.nodes);
  tag(rep, G.name, "mu=" + v.mu, g.seed);
  so.reports.push_back(rep);
  so.config["elliptic-consistency"] = {{"G", G.name}, {"mu", v.mu}, {"omega", complex_vector_json(kappa.omega)},
                                       {"k", {kappa.k.real(), kappa.k.imag()}}, {"modes", v.modes},
                                       {"nodes", v.nodes}, {"tol", tol}};
}

int cmd_verify(const AlgebraChoice& ac, const ChainChoice& cc, const VerifyArgs& v, const Globals& g,
               std::ostream& out) {
  check_globals(g);
  SuiteOutput so;
  const bool affine = v.suite == "prop2" || v.suite == "elliptic-consistency";
  const Loaded a = load_algebra(ac, affine ? "sl2" : "");
  if (v.suite == "cdybe" || v.suite == "equivariance") {
    run_cdybe_like(v.suite, a, cc, v, g, so);
  } else if (v.suite == "prop1") {
    run_prop1(a, cc, v, g, so);
  } else if (v.suite == "prop2") {
    run_prop2(a, v, g, so);
  } else if (v.suite == "elliptic-consistency") {
    run_elliptic(a, v, g, so);
  } else {
    run_cdybe_like("cdybe", a, cc, v, g, so);
    run_cdybe_like("equivariance", a, cc, v, g, so);
    const ResolvedChain rc = resolve_chain(a, cc);
    if (rc.chain->nM() == 0 || rc.chain->nM() % 2 == 1) {
      so.skipped.push_back({{"suite", "prop1"}, {"reason", "complement M is empty or of odd dimension"}});
    } else {
      run_prop1(a, cc, v, g, so);
    }
    run_prop2(a, v, g, so);
    run_elliptic(a, v, g, so);
  }

  bool pass = !so.reports.empty();
  json reports = json::array();
  for (const auto& rep : so.reports) {
    pass = pass && rep.pass;
    reports.push_back(to_json(rep));
  }
  so.config["algebra"] = a.name;
  so.config["seed"] = g.seed;
  so.config["samples"] = g.samples;
  json doc = {{"schema_version", 1}, {"command", "verify"},  {"suite", v.suite},
              {"config", so.config},  {"reports", reports}, {"skipped", so.skipped},
              {"pass", pass}};
  emit(doc, g, out);
  if (!g.out.empty()) {
    for (const auto& rep : so.reports) {
      out << rep.check << " " << rep.chain << ": max residual " << rep.max_residual() << " (tol " << rep.tol << ") "
          << (rep.pass ? "PASS" : "FAIL") << "\n";
    }
  }
  return pass ? kExitPass : kExitVerifyFail;
}

// ---- affine exports ----

int cmd_export_grading(const AlgebraChoice& ac, const std::string& mu, const Globals& g, std::ostream& out) {
  const Loaded G = load_algebra(ac, "sl2");
  const TwistedGrading grading = build_twisted_grading(G.A, named_automorphism(*G.A, mu));
  json doc = grading_json(grading, G.name);
  doc["config"] = {{"G", G.name}, {"mu", mu}};
  doc["orthogonality_residual"] = grading.orthogonality_residual();
  return emit(doc, g, out);
}

struct EllipticArgs {
  std::string mu = "id";
  std::string omega;
  std::string z = "0.2+0.1i";
  std::string tau = "1i";
};

int cmd_elliptic_eval(const AlgebraChoice& ac, const EllipticArgs& e, const Globals& g, std::ostream& out) {
  const Loaded G = load_algebra(ac, "sl2");
  const TwistedGrading grading = build_twisted_grading(G.A, named_automorphism(*G.A, e.mu));
  ThetaParams p;
  p.tau = parse_complex(e.tau);
  validate(p);
  const cplx z = parse_complex(e.z);
  const Vec omega = e.omega.empty() ? Vec(Vec::Zero(G.A->dim())) : parse_kappa(*G.A, e.omega);
  const EllipticR r = elliptic_R(grading, omega, z, p);
  json doc = elliptic_json(grading, omega, z, p, r);
  doc["tensor"] = matrix_json(r.tensor);
  doc["config"] = {{"G", G.name}, {"mu", e.mu}, {"omega", e.omega.empty() ? "0" : e.omega}, {"z", e.z}, {"tau", e.tau}};
  return emit(doc, g, out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"drmat: classical dynamical r-matrices, Dirac reduction and numerical verification"};
  app.name("drmat");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  auto* tol_opt = app.add_option("--tol", g.tol, "verification tolerance (default depends on the check)");
  app.add_option("--seed", g.seed, "random seed for sample points and pairs")->capture_default_str();
  app.add_option("--samples", g.samples, "number of sample points")->capture_default_str();
  app.add_option("--out", g.out, "write the JSON document to this file");

  AlgebraChoice ac;
  ChainChoice cc;

  auto* algebra = app.add_subcommand("algebra", "algebra files and axiom checks");
  algebra->require_subcommand(1);
  auto* validate_cmd = algebra->add_subcommand("validate", "check antisymmetry, Jacobi, invariance and nondegeneracy");
  add_algebra_options(validate_cmd, ac, true);
  auto* export_cmd = algebra->add_subcommand("export", "write a catalog algebra as a description file");
  add_algebra_options(export_cmd, ac, false);

  RmatrixArgs ra;
  auto* rmatrix = app.add_subcommand("rmatrix", "construct and export an r-matrix at one point");
  add_algebra_options(rmatrix, ac, true);
  add_chain_options(rmatrix, cc);
  rmatrix->add_option("--construction", ra.construction,
                      "canonical, reduced-canonical, reduced, dirac, trig, rational or zero (optional +/- suffix)")
      ->required();
  rmatrix->add_option("--sign", ra.sign, "+ or -");
  rmatrix->add_option("--kappa", ra.kappa, "dynamical variable, e.g. \"0.3H + 0.1E\"");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", va.suite, "cdybe, equivariance, prop1, prop2, elliptic-consistency or all")
      ->required()
      ->check(CLI::IsMember({"cdybe", "equivariance", "prop1", "prop2", "elliptic-consistency", "all"}));
  add_algebra_options(verify, ac, true);
  add_chain_options(verify, cc);
  verify->add_option("--r", va.r, "field: canonical+, canonical-, zero, reduced+, dirac, ...")->capture_default_str();
  verify->add_option("--kappa", va.kappa, "centre of the sample box");
  verify->add_option("--deriv", va.deriv, "fd, exact or auto")->capture_default_str();
  verify->add_option("--mu", va.mu, "automorphism: id or coxeter")->capture_default_str();
  verify->add_option("--omega", va.omega, "grade-0 part of kappa (default: seeded)");
  verify->add_option("--k", va.k, "coefficient of d")->capture_default_str();
  verify->add_option("--l", va.l, "coefficient of c")->capture_default_str();
  verify->add_option("--window", va.window, "grade window W")->capture_default_str();
  verify->add_option("--pairs", va.pairs, "random homogeneous pairs")->capture_default_str();
  verify->add_option("--modes", va.modes, "Laurent modes |n| <= modes")->capture_default_str();
  verify->add_option("--nodes", va.nodes, "trapezoid nodes")->capture_default_str();

  std::string grading_mu = "id";
  auto* export_grading = app.add_subcommand("export-grading", "eigenspace decomposition of an automorphism");
  add_algebra_options(export_grading, ac, false);
  export_grading->add_option("--mu", grading_mu, "id or coxeter")->capture_default_str();

  EllipticArgs ea;
  auto* elliptic = app.add_subcommand("elliptic", "spectral-parameter r-matrix");
  elliptic->require_subcommand(1);
  auto* eval_cmd = elliptic->add_subcommand("eval", "evaluate R(omega, z|tau)");
  add_algebra_options(eval_cmd, ac, false);
  eval_cmd->add_option("--mu", ea.mu, "id or coxeter")->capture_default_str();
  eval_cmd->add_option("--omega", ea.omega, "element of G_0");
  eval_cmd->add_option("--z", ea.z, "spectral parameter")->capture_default_str();
  eval_cmd->add_option("--tau", ea.tau, "modular parameter, Im tau > 0")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitPass : kExitConfigError;
  }

  return guarded(err, [&]() -> int {
    if (tol_opt->count() > 0 && !(g.tol > 0.0)) bad("--tol must be positive");
    check_globals(g);
    if (*validate_cmd) return cmd_algebra_validate(ac, g, out, err);
    if (*export_cmd) return cmd_algebra_export(ac, g, out);
    if (*rmatrix) return cmd_rmatrix(ac, cc, ra, g, out);
    if (*verify) return cmd_verify(ac, cc, va, g, out);
    if (*export_grading) return cmd_export_grading(ac, grading_mu, g, out);
    if (*eval_cmd) return cmd_elliptic_eval(ac, ea, g, out);
    bad("no command given");
  });
}

}  // namespace drm
