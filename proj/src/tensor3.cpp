#include "drm/tensor3.hpp"

#include <cmath>
#include <stdexcept>

namespace drm {

double Tensor3::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Tensor3::all_finite() const {
  for (const auto& v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

Tensor3 Tensor3::permuted(const std::array<int, 3>& perm) const {
  Tensor3 out(n_);
  std::array<int, 3> src{};
  std::array<int, 3> dst{};
  for (src[0] = 0; src[0] < n_; ++src[0]) {
    for (src[1] = 0; src[1] < n_; ++src[1]) {
      for (src[2] = 0; src[2] < n_; ++src[2]) {
        for (int k = 0; k < 3; ++k) dst[perm[k]] = src[k];
        out(dst[0], dst[1], dst[2]) = (*this)(src[0], src[1], src[2]);
      }
    }
  }
  return out;
}

Tensor3 Tensor3::antisymmetrized() const {
  static const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}}};
  static const std::array<double, 6> signs{1, 1, 1, -1, -1, -1};
  Tensor3 out(n_);
  for (std::size_t p = 0; p < perms.size(); ++p) {
    Tensor3 t = permuted(perms[p]);
    t *= signs[p] / 6.0;
    out += t;
  }
  return out;
}

Tensor3& Tensor3::operator+=(const Tensor3& o) {
  if (o.n_ != n_) throw std::invalid_argument("Tensor3 dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& o) {
  if (o.n_ != n_) throw std::invalid_argument("Tensor3 dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Tensor3& Tensor3::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

}  // namespace drm
