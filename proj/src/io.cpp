#include "drm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "drm/cdybe.hpp"
#include "drm/error.hpp"

namespace drm {

namespace {

using nlohmann::json;

bool is_positive_zero(double x) { return x == 0.0 && !std::signbit(x); }

bool droppable(cplx z) { return is_positive_zero(z.real()) && is_positive_zero(z.imag()); }

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::Parse, what); }

int index_field(const json& v, int dim, const std::string& where) {
  if (!v.is_number_integer()) parse_fail(where + ": index must be an integer");
  const auto i = v.get<long long>();
  if (i < 0 || i >= dim) parse_fail(where + ": index " + std::to_string(i) + " out of range");
  return static_cast<int>(i);
}

double number_field(const json& v, const std::string& where) {
  if (!v.is_number()) parse_fail(where + ": expected a number");
  return v.get<double>();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\n\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\n\r");
  return std::string(s.substr(b, e - b + 1));
}

// full-string parse of a (possibly imaginary) coefficient; empty means 1
bool parse_coefficient(const std::string& s, cplx& out) {
  if (s.empty()) {
    out = 1.0;
    return true;
  }
  std::string body = s;
  bool imag = false;
  if (body.back() == 'i' || body.back() == 'j') {
    imag = true;
    body.pop_back();
  }
  double v = 1.0;
  if (!body.empty()) {
    const char* first = body.data();
    const char* last = body.data() + body.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return false;
  } else if (!imag) {
    return false;
  }
  out = imag ? cplx(0.0, v) : cplx(v, 0.0);
  return true;
}

}  // namespace

AlgebraData algebra_data(const LieAlgebra& A) { return {A.structure(), A.form(), A.labels()}; }

json algebra_to_json(const AlgebraData& data) {
  const int n = data.f.dim();
  json f = json::array();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const cplx v = data.f(a, b, c);
        if (!droppable(v)) f.push_back({a, b, c, v.real(), v.imag()});
      }
  json B = json::array();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const cplx v = data.form(a, b);
      if (!droppable(v)) B.push_back({a, b, v.real(), v.imag()});
    }
  return {{"schema_version", 1}, {"dim", n}, {"labels", data.labels}, {"f", f}, {"B", B}};
}

json algebra_to_json(const LieAlgebra& A) { return algebra_to_json(algebra_data(A)); }

AlgebraData algebra_from_json(const json& doc) {
  if (!doc.is_object()) parse_fail("algebra document must be a JSON object");
  if (doc.contains("schema_version") && doc["schema_version"] != 1) parse_fail("unsupported schema_version");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) parse_fail("missing integer field \"dim\"");
  const int n = doc["dim"].get<int>();
  if (n <= 0 || n > 4096) parse_fail("\"dim\" must be in [1, 4096]");

  AlgebraData out;
  out.f = Tensor3(n);
  out.form = Mat::Zero(n, n);
  if (doc.contains("labels")) {
    const json& labels = doc["labels"];
    if (!labels.is_array() || static_cast<int>(labels.size()) != n) parse_fail("\"labels\" must list dim strings");
    std::set<std::string> seen;
    for (const auto& l : labels) {
      if (!l.is_string()) parse_fail("labels must be strings");
      if (!seen.insert(l.get<std::string>()).second) parse_fail("duplicate label " + l.get<std::string>());
      out.labels.push_back(l.get<std::string>());
    }
  }

  if (!doc.contains("f") || !doc["f"].is_array()) parse_fail("missing array field \"f\"");
  std::set<std::tuple<int, int, int>> f_seen;
  for (std::size_t k = 0; k < doc["f"].size(); ++k) {
    const json& e = doc["f"][k];
    const std::string where = "f[" + std::to_string(k) + "]";
    if (!e.is_array() || (e.size() != 4 && e.size() != 5)) parse_fail(where + ": expected [a,b,c,re,im]");
    const int a = index_field(e[0], n, where), b = index_field(e[1], n, where), c = index_field(e[2], n, where);
    if (!f_seen.insert({a, b, c}).second) parse_fail(where + ": duplicate entry");
    out.f(a, b, c) = cplx(number_field(e[3], where), e.size() == 5 ? number_field(e[4], where) : 0.0);
  }

  if (!doc.contains("B") || !doc["B"].is_array()) parse_fail("missing array field \"B\"");
  std::set<std::pair<int, int>> b_seen;
  for (std::size_t k = 0; k < doc["B"].size(); ++k) {
    const json& e = doc["B"][k];
    const std::string where = "B[" + std::to_string(k) + "]";
    if (!e.is_array() || (e.size() != 3 && e.size() != 4)) parse_fail(where + ": expected [a,b,re,im]");
    const int a = index_field(e[0], n, where), b = index_field(e[1], n, where);
    if (!b_seen.insert({a, b}).second) parse_fail(where + ": duplicate entry");
    out.form(a, b) = cplx(number_field(e[2], where), e.size() == 4 ? number_field(e[3], where) : 0.0);
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

AlgebraData read_algebra_file(const std::filesystem::path& path) {
  try {
    return algebra_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& rows) {
  if (!rows.is_array()) parse_fail("matrix must be an array of rows");
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (!rows[i].is_array() || static_cast<Eigen::Index>(rows[i].size()) != c) parse_fail("ragged matrix");
    for (Eigen::Index j = 0; j < c; ++j) {
      const json& e = rows[i][j];
      if (!e.is_array() || e.size() != 2) parse_fail("matrix entries must be [re, im]");
      m(i, j) = cplx(number_field(e[0], "matrix"), number_field(e[1], "matrix"));
    }
  }
  return m;
}

json rmatrix_export(const RMatrixField& r, const Vec& kappa, const std::string& algebra_name,
                    const std::string& chain_name, const json& domain_flags) {
  return {{"schema_version", 1},
          {"kappa", complex_vector_json(kappa)},
          {"r", matrix_json(r.eval(kappa))},
          {"sym_part", matrix_json(r.sym_part)},
          {"meta",
           {{"algebra", algebra_name},
            {"labels", r.algebra->labels()},
            {"chain", chain_name},
            {"construction", r.construction},
            {"domain_flags", domain_flags}}}};
}

Vec parse_kappa(const LieAlgebra& A, std::string_view text) {
  // split into signed terms; a sign directly after "<digits>e" belongs to an exponent
  std::vector<std::pair<int, std::string>> terms;
  int sign = 1;
  bool sign_pending = false;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch != '+' && ch != '-') {
      cur += ch;
      continue;
    }
    const std::string t = trim(cur);
    const bool exponent = t.size() >= 2 && (t.back() == 'e' || t.back() == 'E') &&
                          t.find_first_not_of("0123456789.") == t.size() - 1;
    if (exponent) {
      cur += ch;
      continue;
    }
    if (!t.empty()) {
      terms.emplace_back(sign, t);
      cur.clear();
    } else if (sign_pending) {
      parse_fail("kappa: doubled sign at position " + std::to_string(i));
    }
    sign = ch == '-' ? -1 : 1;
    sign_pending = true;
  }
  if (trim(cur).empty()) parse_fail(text.empty() ? "kappa: empty expression" : "kappa: expression ends with a sign");
  terms.emplace_back(sign, trim(cur));

  Vec out = Vec::Zero(A.dim());
  for (const auto& [s, term] : terms) {
    std::string coeff_text, label;
    const auto star = term.find('*');
    if (star != std::string::npos) {
      coeff_text = trim(term.substr(0, star));
      label = trim(term.substr(star + 1));
    } else {
      // longest label suffix whose prefix is a valid coefficient
      bool found = false;
      for (std::size_t k = 0; k < term.size() && !found; ++k) {
        const std::string lab = trim(term.substr(k));
        cplx tmp;
        if (A.index_of(lab) && parse_coefficient(trim(term.substr(0, k)), tmp)) {
          coeff_text = trim(term.substr(0, k));
          label = lab;
          found = true;
        }
      }
      if (!found) parse_fail("kappa: cannot read term \"" + term + "\" (unknown label or bad coefficient)");
    }
    cplx coeff;
    if (!parse_coefficient(coeff_text, coeff)) parse_fail("kappa: bad coefficient \"" + coeff_text + "\"");
    const auto idx = A.index_of(label);
    if (!idx) parse_fail("kappa: unknown label \"" + label + "\"");
    out(*idx) += static_cast<double>(s) * coeff;
  }
  return out;
}

cplx parse_complex(std::string_view text) {
  const std::string t = trim(text);
  cplx z;
  if (parse_coefficient(t, z) && !t.empty()) return z;
  // split at the last sign that is neither leading nor part of an exponent
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      cplx re, im;
      const std::string tail = trim(t.substr(k + 1));
      if (parse_coefficient(trim(t.substr(0, k)), re) && re.imag() == 0.0 && !tail.empty() &&
          (tail.back() == 'i' || tail.back() == 'j') && parse_coefficient(tail, im)) {
        return re + (t[k] == '-' ? -im : im);
      }
      break;
    }
  }
  throw Error(ErrorKind::Parse, "cannot read complex number \"" + t + "\"");
}

}  // namespace drm
