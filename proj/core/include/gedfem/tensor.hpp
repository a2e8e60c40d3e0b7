#pragma once

#include <array>
#include <stdexcept>

#include "gedfem/dual.hpp"

namespace gedfem {

class SingularTensorError : public std::runtime_error {
 public:
  explicit SingularTensorError(const char* what) : std::runtime_error(what) {}
};

template <typename T>
struct Vec3 {
  std::array<T, 3> e{};

  Vec3() { e.fill(T(0.0)); }
  Vec3(T x, T y, T z) : e{x, y, z} {}

  T& operator[](int i) { return e[i]; }
  const T& operator[](int i) const { return e[i]; }
};

template <typename T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Dense 3x3 second-order tensor, row-major. Holds F, C, P, cof C and friends;
// T is double in interfaces and a Dual type inside differentiated code paths.
template <typename T>
struct Tensor2 {
  std::array<T, 9> e{};

  Tensor2() { e.fill(T(0.0)); }

  static Tensor2 identity() {
    Tensor2 r;
    r(0, 0) = T(1.0);
    r(1, 1) = T(1.0);
    r(2, 2) = T(1.0);
    return r;
  }

  static Tensor2 diag(T a, T b, T c) {
    Tensor2 r;
    r(0, 0) = a;
    r(1, 1) = b;
    r(2, 2) = c;
    return r;
  }

  T& operator()(int i, int j) { return e[3 * i + j]; }
  const T& operator()(int i, int j) const { return e[3 * i + j]; }
};

using Tensor2d = Tensor2<double>;
using Vec3d = Vec3<double>;

template <typename T>
Tensor2<T> operator+(const Tensor2<T>& a, const Tensor2<T>& b) {
  Tensor2<T> r;
  for (int i = 0; i < 9; ++i) r.e[i] = a.e[i] + b.e[i];
  return r;
}

template <typename T>
Tensor2<T> operator-(const Tensor2<T>& a, const Tensor2<T>& b) {
  Tensor2<T> r;
  for (int i = 0; i < 9; ++i) r.e[i] = a.e[i] - b.e[i];
  return r;
}

template <typename T, typename S>
Tensor2<T> operator*(const S& s, const Tensor2<T>& a) {
  Tensor2<T> r;
  for (int i = 0; i < 9; ++i) r.e[i] = s * a.e[i];
  return r;
}

template <typename T>
Tensor2<T> operator*(const Tensor2<T>& a, const Tensor2<T>& b) {
  Tensor2<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T acc = a(i, 0) * b(0, j);
      acc += a(i, 1) * b(1, j);
      acc += a(i, 2) * b(2, j);
      r(i, j) = acc;
    }
  return r;
}

template <typename T>
Vec3<T> operator*(const Tensor2<T>& a, const Vec3<T>& v) {
  Vec3<T> r;
  for (int i = 0; i < 3; ++i) r[i] = a(i, 0) * v[0] + a(i, 1) * v[1] + a(i, 2) * v[2];
  return r;
}

template <typename T>
Tensor2<T> transpose(const Tensor2<T>& a) {
  Tensor2<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

template <typename T>
T trace(const Tensor2<T>& a) {
  return a(0, 0) + a(1, 1) + a(2, 2);
}

template <typename T>
T ddot(const Tensor2<T>& a, const Tensor2<T>& b) {
  T acc = a.e[0] * b.e[0];
  for (int i = 1; i < 9; ++i) acc += a.e[i] * b.e[i];
  return acc;
}

// Cofactor expansion along the first row.
template <typename T>
T determinant(const Tensor2<T>& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

// cof(T)_ij = minor signed; built from minors so it stays valid at singular T.
template <typename T>
Tensor2<T> cofactor(const Tensor2<T>& a) {
  Tensor2<T> r;
  r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  r(0, 1) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  r(0, 2) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  r(1, 0) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  r(1, 2) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  r(2, 0) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  r(2, 1) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return r;
}

inline constexpr double kSingularDetThreshold = 1e-14;

// Adjugate-based inverse. Near-singular input is a recoverable numerical
// failure, reported via SingularTensorError.
template <typename T>
Tensor2<T> inverse(const Tensor2<T>& a) {
  const T det = determinant(a);
  const double d = value_of(det);
  if (!(d > kSingularDetThreshold || d < -kSingularDetThreshold))
    throw SingularTensorError("tensor inverse: determinant below singularity threshold");
  const Tensor2<T> cof = cofactor(a);
  Tensor2<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = cof(j, i) / det;
  return r;
}

template <typename T>
Tensor2<T> right_cauchy_green(const Tensor2<T>& f) {
  return transpose(f) * f;
}

// Invariants used by the constitutive models: I1 = tr C, I2 = tr cof C,
// I3 = det C, J = sqrt I3, I1G = J^{-2/3} I1, I2G = I2^3 / (9 J^4).
template <typename T>
struct InvariantSet {
  T i1, i2, i3, j, i1g, i2g;
};

template <typename T>
InvariantSet<T> invariants(const Tensor2<T>& c) {
  InvariantSet<T> inv;
  inv.i1 = trace(c);
  inv.i2 = trace(cofactor(c));
  inv.i3 = determinant(c);
  if (!(value_of(inv.i3) > 0.0))
    throw SingularTensorError("invariants: det C must be positive");
  inv.j = sqrt(inv.i3);
  inv.i1g = pow(inv.j, -2.0 / 3.0) * inv.i1;
  inv.i2g = inv.i2 * inv.i2 * inv.i2 / (9.0 * inv.i3 * inv.i3);
  return inv;
}

// Gradient of a scalar function of a 3x3 tensor in one forward pass (9 seeds).
template <typename F>
Tensor2d grad_wrt_tensor(F&& f, const Tensor2d& t) {
  Tensor2<Dual<double, 9>> td;
  for (int i = 0; i < 9; ++i) td.e[i] = Dual<double, 9>::seeded(t.e[i], i);
  const Dual<double, 9> y = f(td);
  Tensor2d g;
  for (int i = 0; i < 9; ++i) g.e[i] = y.tang[i];
  return g;
}

}  // namespace gedfem
