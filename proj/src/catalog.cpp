#include "drm/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

#include "drm/error.hpp"

namespace drm {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Splits "sl(3)" / "sl3" into ("sl", 3); returns -1 when there is no number.
std::pair<std::string, int> split_name(std::string_view raw) {
  std::string s = trim(raw);
  std::string base;
  std::string digits;
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
    } else if (c != '(' && c != ')') {
      if (!digits.empty()) return {s, -1};
      base += c;
    }
  }
  if (!base.empty() && base.back() == '_') base.pop_back();
  if (digits.empty()) return {base, -1};
  int v = 0;
  std::from_chars(digits.data(), digits.data() + digits.size(), v);
  return {base, v};
}

std::string pair_label(char prefix, int i, int j, int d) {
  std::ostringstream os;
  os << prefix << i;
  if (d >= 10) os << "_";
  os << j;
  return os.str();
}

}  // namespace

std::vector<Mat> sl_matrix_basis(int n) {
  std::vector<Mat> basis;
  for (int i = 0; i + 1 < n; ++i) {
    Mat h = Mat::Zero(n, n);
    h(i, i) = 1.0;
    h(i + 1, i + 1) = -1.0;
    basis.push_back(h);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = 1.0;
      basis.push_back(e);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(j, i) = 1.0;
      basis.push_back(e);
    }
  }
  return basis;
}

Vec sl_coordinates(const Mat& x) {
  const int n = static_cast<int>(x.rows());
  Vec c = Vec::Zero(n * n - 1);
  // diagonal: entry i of sum_k c_k H_k is c_i - c_{i-1}
  cplx acc{};
  for (int i = 0; i + 1 < n; ++i) {
    acc += x(i, i);
    c(i) = acc;
  }
  int idx = n - 1;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) c(idx++) = x(i, j);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) c(idx++) = x(j, i);
  }
  return c;
}

LieAlgebra make_sl(int n) {
  if (n < 2) throw Error(ErrorKind::BadParams, "sl(n) needs n >= 2");
  const auto basis = sl_matrix_basis(n);
  const int dim = static_cast<int>(basis.size());
  Tensor3 f(dim);
  Mat form(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      const auto& x = basis[static_cast<std::size_t>(a)];
      const auto& y = basis[static_cast<std::size_t>(b)];
      const Vec c = sl_coordinates(x * y - y * x);
      for (int k = 0; k < dim; ++k) f(a, b, k) = c(k);
      form(a, b) = (x * y).trace();
    }
  }
  std::vector<std::string> labels;
  if (n == 2) {
    labels = {"H", "E", "F"};
  } else {
    for (int i = 1; i < n; ++i) labels.push_back("H" + std::to_string(i));
    const auto sep = n >= 10 ? "_" : "";
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) labels.push_back("E" + std::to_string(i) + sep + std::to_string(j));
    }
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) labels.push_back("E" + std::to_string(j) + sep + std::to_string(i));
    }
  }
  return LieAlgebra::build(std::move(f), std::move(form), std::move(labels));
}

LieAlgebra make_e_selfdual(int d, double p) {
  if (d < 2) throw Error(ErrorKind::BadParams, "e_selfdual(d) needs d >= 2");
  const int npairs = d * (d - 1) / 2;
  const int dim = d + 2 * npairs;
  // pair index of (i,j), i != j, with the sign of J_ij relative to J_{min,max}
  std::map<std::pair<int, int>, int> pair_idx;
  int k = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) pair_idx[{i, j}] = k++;
  }
  auto P = [](int i) { return i; };
  auto jt = [&](int i, int j, int offset) -> std::pair<int, double> {
    if (i == j) return {-1, 0.0};
    if (i < j) return {offset + pair_idx.at({i, j}), 1.0};
    return {offset + pair_idx.at({j, i}), -1.0};
  };
  const int jOff = d;
  const int tOff = d + npairs;
  auto J = [&](int i, int j) { return jt(i, j, jOff); };
  auto T = [&](int i, int j) { return jt(i, j, tOff); };
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

  Tensor3 f(dim);
  auto add = [&](int a, int b, std::pair<int, double> target, double coeff) {
    if (target.first < 0 || coeff == 0.0) return;
    f(a, b, target.first) += coeff * target.second;
    f(b, a, target.first) -= coeff * target.second;
  };

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  }

  for (const auto& [i, j] : pairs) {
    const int jij = J(i, j).first;
    for (const auto& [kk, l] : pairs) {
      const int jkl = J(kk, l).first;
      const int tkl = T(kk, l).first;
      // [J_ij, J_kl] and [J_ij, T_kl]; pairs (a,b) with a<b in index order only,
      // the antisymmetric partner is filled by add()
      if (jij < jkl) {
        add(jij, jkl, J(i, l), delta(j, kk));
        add(jij, jkl, J(j, kk), delta(i, l));
        add(jij, jkl, J(i, kk), -delta(j, l));
        add(jij, jkl, J(j, l), -delta(i, kk));
      }
      add(jij, tkl, T(i, l), delta(j, kk));
      add(jij, tkl, T(j, kk), delta(i, l));
      add(jij, tkl, T(i, kk), -delta(j, l));
      add(jij, tkl, T(j, l), -delta(i, kk));
    }
    for (int kk = 0; kk < d; ++kk) {
      // [J_ij, P_k] = delta_jk P_i - delta_ik P_j
      add(jij, P(kk), {P(i), 1.0}, delta(j, kk));
      add(jij, P(kk), {P(j), 1.0}, -delta(i, kk));
    }
  }
  for (int kk = 0; kk < d; ++kk) {
    for (int l = kk + 1; l < d; ++l) add(P(kk), P(l), T(kk, l), 1.0);
  }

  Mat form = Mat::Zero(dim, dim);
  for (int i = 0; i < d; ++i) form(P(i), P(i)) = 1.0;
  for (const auto& [i, j] : pairs) {
    for (const auto& [kk, l] : pairs) {
      const double v = delta(j, kk) * delta(i, l) - delta(i, kk) * delta(j, l);
      if (v == 0.0) continue;
      const int a = J(i, j).first;
      const int bj = J(kk, l).first;
      const int bt = T(kk, l).first;
      form(a, bj) = p * v;
      form(a, bt) = v;
      form(bt, a) = v;
    }
  }

  std::vector<std::string> labels;
  for (int i = 1; i <= d; ++i) labels.push_back("P" + std::to_string(i));
  for (const auto& [i, j] : pairs) labels.push_back(pair_label('J', i + 1, j + 1, d));
  for (const auto& [i, j] : pairs) labels.push_back(pair_label('T', i + 1, j + 1, d));
  return LieAlgebra::build(std::move(f), std::move(form), std::move(labels));
}

LieAlgebra make_oscillator(int n) {
  if (n < 1) throw Error(ErrorKind::BadParams, "oscillator(n) needs n >= 1");
  const int dim = 2 * n + 2;
  const int c = 2 * n;
  const int N = 2 * n + 1;
  Tensor3 f(dim);
  auto set = [&](int a, int b, int t, double v) {
    f(a, b, t) += v;
    f(b, a, t) -= v;
  };
  for (int i = 0; i < n; ++i) {
    const int a = i;
    const int ad = n + i;
    set(a, ad, c, 1.0);    // [a_i, ad_i] = c
    set(N, a, a, -1.0);    // [N, a_i] = -a_i
    set(N, ad, ad, 1.0);   // [N, ad_i] = ad_i
  }
  Mat form = Mat::Zero(dim, dim);
  form(c, N) = form(N, c) = 1.0;
  for (int i = 0; i < n; ++i) form(i, n + i) = form(n + i, i) = -1.0;

  std::vector<std::string> labels;
  for (int i = 1; i <= n; ++i) labels.push_back("a" + std::to_string(i));
  for (int i = 1; i <= n; ++i) labels.push_back("ad" + std::to_string(i));
  labels.push_back("c");
  labels.push_back("N");
  return LieAlgebra::build(std::move(f), std::move(form), std::move(labels));
}

LieAlgebra catalog(std::string_view name, CatalogParams params) {
  auto [base, num] = split_name(name);
  std::transform(base.begin(), base.end(), base.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (base == "sl") {
    if (num > 0) params.n = num;
    return make_sl(params.n);
  }
  if (base == "e_selfdual" || base == "eselfdual" || base == "e") {
    if (num > 0) params.d = num;
    return make_e_selfdual(params.d, params.p);
  }
  if (base == "oscillator" || base == "osc") {
    if (num > 0) params.n = num;
    return make_oscillator(params.n);
  }
  throw Error(ErrorKind::UnknownName, "unknown catalog algebra '" + std::string(name) + "'");
}

std::vector<int> named_indices(const LieAlgebra& algebra, std::string_view raw) {
  const std::string name = trim(raw);
  const auto& labels = algebra.labels();
  const int n = algebra.dim();
  std::vector<int> out;
  auto by_prefix = [&](std::initializer_list<char> prefixes) {
    for (int a = 0; a < n; ++a) {
      const auto& l = labels[static_cast<std::size_t>(a)];
      for (char p : prefixes) {
        if (!l.empty() && l[0] == p) {
          out.push_back(a);
          break;
        }
      }
    }
  };
  if (name == "all") {
    for (int a = 0; a < n; ++a) out.push_back(a);
  } else if (name == "cartan") {
    by_prefix({'H'});
  } else if (name == "levi") {
    by_prefix({'H'});
    for (const char* l : {"E12", "E21"}) {
      const auto idx = algebra.index_of(l);
      if (!idx) throw Error(ErrorKind::BadParams, "'levi' needs sl(n) with n >= 3");
      out.push_back(*idx);
    }
  } else if (name == "JT") {
    by_prefix({'J', 'T'});
  } else if (name == "Nc") {
    for (const char* l : {"N", "c"}) {
      const auto idx = algebra.index_of(l);
      if (!idx) throw Error(ErrorKind::BadParams, "'Nc' needs the oscillator algebra");
      out.push_back(*idx);
    }
  } else {
    std::stringstream ss(name);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto idx = algebra.index_of(item);
      if (!idx) throw Error(ErrorKind::BadParams, "unknown basis label '" + item + "'");
      out.push_back(*idx);
    }
  }
  if (out.empty()) throw Error(ErrorKind::BadParams, "subspace '" + name + "' is empty for this algebra");
  return out;
}

Vec e_selfdual_kappa0(const LieAlgebra& algebra, int d) {
  if (d % 2 != 0) throw Error(ErrorKind::BadParams, "kappa0 needs even d");
  Vec k = Vec::Zero(algebra.dim());
  for (int i = 1; i < d; i += 2) {
    const auto idx = algebra.index_of(pair_label('J', i, i + 1, d));
    if (!idx) throw Error(ErrorKind::BadParams, "algebra is not e_selfdual(" + std::to_string(d) + ")");
    k(*idx) = 1.0;
  }
  return k;
}

}  // namespace drm
