#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "drm/catalog.hpp"
#include "drm/cli.hpp"
#include "drm/error.hpp"
#include "drm/io.hpp"
#include "test_util.hpp"

using namespace drm;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "drmat");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

ErrorKind parse_error(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

bool bit_equal(cplx a, cplx b) { return std::memcmp(&a, &b, sizeof(cplx)) == 0; }

}  // namespace

TEST(Io, AlgebraJsonRoundTripIsBitExact) {
  for (const char* name : {"sl2", "sl4", "e_selfdual(3)", "oscillator(2)"}) {
    const LieAlgebra A = catalog(name);
    const std::string text = dump_json(algebra_to_json(A));
    const AlgebraData back = algebra_from_json(json::parse(text));
    ASSERT_EQ(back.f.dim(), A.dim());
    EXPECT_EQ(back.labels, A.labels());
    for (std::size_t i = 0; i < back.f.data().size(); ++i)
      ASSERT_TRUE(bit_equal(back.f.data()[i], A.structure().data()[i])) << name << " entry " << i;
    for (int a = 0; a < A.dim(); ++a)
      for (int b = 0; b < A.dim(); ++b) ASSERT_TRUE(bit_equal(back.form(a, b), A.form()(a, b)));
    EXPECT_EQ(dump_json(algebra_to_json(back)), text) << name;
  }
}

TEST(Io, MalformedAlgebraDocuments) {
  const json good = algebra_to_json(catalog("sl2"));
  auto with = [&](const std::function<void(json&)>& edit) {
    json d = good;
    edit(d);
    return parse_error([&] { algebra_from_json(d); });
  };
  EXPECT_EQ(with([](json& d) { d.erase("dim"); }), ErrorKind::Parse);
  EXPECT_EQ(with([](json& d) { d["dim"] = 0; }), ErrorKind::Parse);
  EXPECT_EQ(with([](json& d) { d["f"].push_back({0, 1, 7, 1.0, 0.0}); }), ErrorKind::Parse);
  EXPECT_EQ(with([](json& d) { d["f"].push_back(d["f"][0]); }), ErrorKind::Parse);
  EXPECT_EQ(with([](json& d) { d["B"][0] = {0, 1}; }), ErrorKind::Parse);
  EXPECT_EQ(with([](json& d) { d["labels"] = {"H", "H", "F"}; }), ErrorKind::Parse);
  EXPECT_EQ(with([](json& d) { d["schema_version"] = 2; }), ErrorKind::Parse);
  EXPECT_EQ(with([](json& d) { d = json::array(); }), ErrorKind::Parse);
}

TEST(Io, MissingAndCorruptFiles) {
  test::TempDir dir;
  EXPECT_EQ(parse_error([&] { read_algebra_file(dir / "nope.json"); }), ErrorKind::Io);
  write_text_file(dir / "bad.json", "{ \"dim\": 3, ");
  EXPECT_EQ(parse_error([&] { read_algebra_file(dir / "bad.json"); }), ErrorKind::Parse);
}

TEST(Io, KappaParser) {
  const LieAlgebra sl2 = catalog("sl2");
  Vec v = parse_kappa(sl2, "0.3H + 0.1E");
  EXPECT_EQ(v(0), cplx(0.3));
  EXPECT_EQ(v(1), cplx(0.1));
  EXPECT_EQ(v(2), cplx(0.0));
  v = parse_kappa(sl2, "-H+2*F - 1e-3E");
  EXPECT_EQ(v(0), cplx(-1.0));
  EXPECT_EQ(v(2), cplx(2.0));
  EXPECT_EQ(v(1), cplx(-1e-3));
  v = parse_kappa(sl2, "2.5e+1 H");
  EXPECT_EQ(v(0), cplx(25.0));

  const LieAlgebra sl3 = catalog("sl3");
  v = parse_kappa(sl3, "0.5i E12 + H1 + H1");
  EXPECT_EQ(v(*sl3.index_of("E12")), cplx(0.0, 0.5));
  EXPECT_EQ(v(*sl3.index_of("H1")), cplx(2.0));
  v = parse_kappa(sl3, "-H1+2*H2");
  EXPECT_EQ(v(1), cplx(2.0));

  for (const char* bad : {"", "0.3X", "0.3H +", "0.3H ++ E", "abcH", "2**H"})
    EXPECT_EQ(parse_error([&] { parse_kappa(sl2, bad); }), ErrorKind::Parse) << bad;
}

TEST(Io, ComplexParser) {
  EXPECT_EQ(parse_complex("0.5"), cplx(0.5));
  EXPECT_EQ(parse_complex("1i"), cplx(0.0, 1.0));
  EXPECT_EQ(parse_complex("i"), cplx(0.0, 1.0));
  EXPECT_EQ(parse_complex("0.2+0.1i"), cplx(0.2, 0.1));
  EXPECT_EQ(parse_complex("-0.2-3i"), cplx(-0.2, -3.0));
  EXPECT_EQ(parse_complex("1e-2+2e-1i"), cplx(0.01, 0.2));
  EXPECT_THROW(parse_complex("1+2"), Error);
  EXPECT_THROW(parse_complex("z"), Error);
}

TEST(Cli, ValidateCatalogAlgebra) {
  const CliResult r = run({"algebra", "validate", "--G", "sl3"});
  EXPECT_EQ(r.code, kExitPass) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["pass"], true);
  EXPECT_EQ(doc["dim"], 8);
}

TEST(Cli, ValidateRejectsBrokenJacobi) {
  test::TempDir dir;
  test::Sl2Data d;
  d.f(1, 2, 1) = 1.0;
  d.f(2, 1, 1) = -1.0;
  write_text_file(dir / "broken.json", dump_json(algebra_to_json(AlgebraData{d.f, d.B, d.labels})));
  const CliResult r = run({"algebra", "validate", "--file", (dir / "broken.json").string()});
  EXPECT_EQ(r.code, kExitMathError);
  EXPECT_NE((r.out + r.err).find("Jacobi"), std::string::npos);
}

TEST(Cli, ExportThenValidateFile) {
  test::TempDir dir;
  const std::string path = (dir / "e3.json").string();
  EXPECT_EQ(run({"--out", path, "algebra", "export", "--G", "e_selfdual", "--d", "3"}).code, kExitPass);
  EXPECT_EQ(run({"algebra", "validate", "--file", path}).code, kExitPass);
}

TEST(Cli, ConfigErrors) {
  test::TempDir dir;
  write_text_file(dir / "bad.json", "[1, 2");
  EXPECT_EQ(run({"algebra", "validate", "--file", (dir / "bad.json").string()}).code, kExitConfigError);
  EXPECT_EQ(run({"algebra", "validate", "--file", (dir / "missing.json").string()}).code, kExitConfigError);
  EXPECT_EQ(run({"verify", "bogus", "--G", "sl2"}).code, kExitConfigError);
  EXPECT_EQ(run({"rmatrix", "--G", "sl2", "--construction", "trig", "--kappa", "0.3X"}).code, kExitConfigError);
  EXPECT_EQ(run({"--tol", "-1", "verify", "cdybe", "--G", "sl2"}).code, kExitConfigError);
  EXPECT_EQ(run({"--nonsense"}).code, kExitConfigError);
  EXPECT_EQ(run({"--help"}).code, kExitPass);
}

TEST(Cli, RmatrixExport) {
  const CliResult r =
      run({"rmatrix", "--G", "sl2", "--construction", "reduced-canonical", "--kappa", "0.3H", "--sign", "+"});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  const json doc = json::parse(r.out);
  const Mat m = matrix_from_json(doc["r"]);
  EXPECT_NEAR(m(1, 2).real(), 0.5 / std::tanh(0.3) + 0.5, 1e-13);
  EXPECT_NEAR(m(0, 0).real(), 0.25, 1e-15);
  EXPECT_EQ(doc["meta"]["labels"], json({"H", "E", "F"}));
}

TEST(Cli, DomainErrorsExitWithMathCode) {
  const CliResult wall = run({"rmatrix", "--G", "sl2", "--construction", "reduced-canonical", "--kappa", "0H"});
  EXPECT_EQ(wall.code, kExitMathError);
  const CliResult odd = run({"verify", "prop1", "--G", "e_selfdual", "--d", "3"});
  EXPECT_EQ(odd.code, kExitMathError);
  EXPECT_NE(odd.err.find("SingularC"), std::string::npos) << odd.err;
  EXPECT_EQ(run({"elliptic", "eval", "--G", "sl2", "--tau", "0.5-0.1i"}).code, kExitMathError);
}

TEST(Cli, VerifySuites) {
  EXPECT_EQ(run({"verify", "prop1", "--G", "sl3"}).code, kExitPass);
  EXPECT_EQ(run({"verify", "prop2", "--G", "sl2", "--mu", "coxeter"}).code, kExitPass);
  EXPECT_EQ(run({"verify", "cdybe", "--G", "sl3", "--deriv", "exact"}).code, kExitPass);
  const CliResult strict = run({"--tol", "1e-15", "verify", "prop1", "--G", "sl3"});
  EXPECT_EQ(strict.code, kExitVerifyFail);
  EXPECT_EQ(json::parse(strict.out)["pass"], false);
}

TEST(Cli, OutputIsDeterministic) {
  const std::vector<std::string> args{"verify", "prop2", "--G", "sl3", "--mu", "coxeter", "--pairs", "10"};
  const CliResult a = run(args), b = run(args);
  EXPECT_EQ(a.code, kExitPass);
  EXPECT_EQ(a.out, b.out);
  const CliResult c = run({"--seed", "8", "verify", "prop2", "--G", "sl3", "--mu", "coxeter", "--pairs", "10"});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, GradingAndEllipticDocuments) {
  const CliResult g = run({"export-grading", "--G", "sl3", "--mu", "coxeter"});
  ASSERT_EQ(g.code, kExitPass) << g.err;
  const json gd = json::parse(g.out);
  EXPECT_EQ(gd["N"], 3);
  EXPECT_EQ(gd["eigenspace_dims"]["0"], 2);
  EXPECT_EQ(gd["eigenspace_dims"]["1"], 3);
  EXPECT_EQ(gd["eigenspace_dims"]["2"], 3);

  const CliResult e = run({"elliptic", "eval", "--G", "sl2", "--z", "0.2+0.1i", "--tau", "1i"});
  ASSERT_EQ(e.code, kExitPass) << e.err;
  const json ed = json::parse(e.out);
  const Mat t = matrix_from_json(ed["tensor"]);
  EXPECT_EQ(t.rows(), 3);
  EXPECT_TRUE(t.allFinite());
}
