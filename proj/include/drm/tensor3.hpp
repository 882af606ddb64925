#pragma once

#include <array>
#include <vector>

#include "drm/types.hpp"

namespace drm {

/// Dense coefficient array of an element T = T^{abc} T_a (x) T_b (x) T_c.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, cplx{}) {}

  int dim() const { return n_; }

  cplx& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }
  const cplx& operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }

  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  double max_abs() const;
  bool all_finite() const;

  /// Slot permutation: result(i_{perm[0]}, i_{perm[1]}, i_{perm[2]}) = this(i0, i1, i2),
  /// i.e. perm[k] is the destination slot of source slot k.
  Tensor3 permuted(const std::array<int, 3>& perm) const;

  /// Full antisymmetrization (1/6) sum_sigma sgn(sigma) sigma(T).
  Tensor3 antisymmetrized() const;

  Tensor3& operator+=(const Tensor3& o);
  Tensor3& operator-=(const Tensor3& o);
  Tensor3& operator*=(cplx s);

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(cplx s, Tensor3 a) { return a *= s; }

 private:
  std::size_t index(int a, int b, int c) const {
    return (static_cast<std::size_t>(a) * n_ + b) * n_ + c;
  }

  int n_ = 0;
  std::vector<cplx> data_;
};

}  // namespace drm
