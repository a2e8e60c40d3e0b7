#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace gedfem {

// Forward-mode dual number with a fixed-width tangent vector.
//
// The scalar payload T is either double or another Dual, so nesting gives
// exact higher derivatives (Dual<Dual<double,32>,13> carries a value, 13
// first-order tangents and their 32 directional derivatives each).
// Comparisons act on the value part only; arithmetic with all-zero tangent
// seeds reproduces the plain double computation bit for bit.
template <typename T, int N>
struct Dual {
  T value{};
  std::array<T, N> tang{};

  Dual() = default;
  Dual(double v) : value(v) { tang.fill(T(0.0)); }  // NOLINT: implicit by design
  template <typename U = T, std::enable_if_t<!std::is_same_v<U, double>, int> = 0>
  Dual(const T& v) : value(v) {
    tang.fill(T(0.0));
  }

  static Dual seeded(const T& v, int direction) {
    Dual r(v);
    r.tang[direction] = T(1.0);
    return r;
  }
};

// ---- value extraction (recurses through nesting levels) ----

inline double value_of(double x) { return x; }

template <typename T, int N>
double value_of(const Dual<T, N>& x) {
  return value_of(x.value);
}

// ---- comparisons: value-part semantics ----

template <typename T, int N>
bool operator<(const Dual<T, N>& a, const Dual<T, N>& b) {
  return value_of(a) < value_of(b);
}
template <typename T, int N>
bool operator<(const Dual<T, N>& a, double b) {
  return value_of(a) < b;
}
template <typename T, int N>
bool operator<(double a, const Dual<T, N>& b) {
  return a < value_of(b);
}
template <typename T, int N>
bool operator>(const Dual<T, N>& a, const Dual<T, N>& b) {
  return value_of(a) > value_of(b);
}
template <typename T, int N>
bool operator>(const Dual<T, N>& a, double b) {
  return value_of(a) > b;
}
template <typename T, int N>
bool operator>(double a, const Dual<T, N>& b) {
  return a > value_of(b);
}
template <typename T, int N>
bool operator<=(const Dual<T, N>& a, double b) {
  return value_of(a) <= b;
}
template <typename T, int N>
bool operator>=(const Dual<T, N>& a, double b) {
  return value_of(a) >= b;
}

// ---- arithmetic ----

template <typename T, int N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.value = -a.value;
  for (int i = 0; i < N; ++i) r.tang[i] = -a.tang[i];
  return r;
}

template <typename T, int N>
Dual<T, N> operator+(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.value = a.value + b.value;
  for (int i = 0; i < N; ++i) r.tang[i] = a.tang[i] + b.tang[i];
  return r;
}
template <typename T, int N>
Dual<T, N> operator+(const Dual<T, N>& a, double b) {
  Dual<T, N> r = a;
  r.value = a.value + b;
  return r;
}
template <typename T, int N>
Dual<T, N> operator+(double a, const Dual<T, N>& b) {
  return b + a;
}

template <typename T, int N>
Dual<T, N> operator-(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.value = a.value - b.value;
  for (int i = 0; i < N; ++i) r.tang[i] = a.tang[i] - b.tang[i];
  return r;
}
template <typename T, int N>
Dual<T, N> operator-(const Dual<T, N>& a, double b) {
  Dual<T, N> r = a;
  r.value = a.value - b;
  return r;
}
template <typename T, int N>
Dual<T, N> operator-(double a, const Dual<T, N>& b) {
  Dual<T, N> r = -b;
  r.value = a - b.value;
  return r;
}

template <typename T, int N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.value = a.value * b.value;
  for (int i = 0; i < N; ++i) r.tang[i] = a.tang[i] * b.value + a.value * b.tang[i];
  return r;
}
template <typename T, int N>
Dual<T, N> operator*(const Dual<T, N>& a, double b) {
  Dual<T, N> r;
  r.value = a.value * b;
  for (int i = 0; i < N; ++i) r.tang[i] = a.tang[i] * b;
  return r;
}
template <typename T, int N>
Dual<T, N> operator*(double a, const Dual<T, N>& b) {
  return b * a;
}

template <typename T, int N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.value = a.value / b.value;
  for (int i = 0; i < N; ++i) r.tang[i] = (a.tang[i] - r.value * b.tang[i]) / b.value;
  return r;
}
template <typename T, int N>
Dual<T, N> operator/(const Dual<T, N>& a, double b) {
  Dual<T, N> r;
  r.value = a.value / b;
  for (int i = 0; i < N; ++i) r.tang[i] = a.tang[i] / b;
  return r;
}
template <typename T, int N>
Dual<T, N> operator/(double a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.value = a / b.value;
  for (int i = 0; i < N; ++i) r.tang[i] = -(r.value / b.value) * b.tang[i];
  return r;
}

template <typename T, int N>
Dual<T, N>& operator+=(Dual<T, N>& a, const Dual<T, N>& b) {
  a = a + b;
  return a;
}
template <typename T, int N>
Dual<T, N>& operator-=(Dual<T, N>& a, const Dual<T, N>& b) {
  a = a - b;
  return a;
}
template <typename T, int N>
Dual<T, N>& operator*=(Dual<T, N>& a, const Dual<T, N>& b) {
  a = a * b;
  return a;
}

// ---- elementary functions (double base cases first) ----

using std::exp;
using std::log;
using std::pow;
using std::sqrt;

inline double sigmoid(double x) {
  if (x > 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// Macaulay bracket <x>+ with the elastic-side convention: derivative 0 at x = 0.
inline double macaulay(double x) { return x > 0.0 ? x : 0.0; }

template <typename T, int N>
Dual<T, N> log(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.value = log(a.value);
  for (int i = 0; i < N; ++i) r.tang[i] = a.tang[i] / a.value;
  return r;
}

template <typename T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.value = exp(a.value);
  for (int i = 0; i < N; ++i) r.tang[i] = r.value * a.tang[i];
  return r;
}

template <typename T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.value = sqrt(a.value);
  const T half_inv = 0.5 / r.value;
  for (int i = 0; i < N; ++i) r.tang[i] = half_inv * a.tang[i];
  return r;
}

template <typename T, int N>
Dual<T, N> pow(const Dual<T, N>& a, double p) {
  Dual<T, N> r;
  r.value = pow(a.value, p);
  const T slope = p * pow(a.value, p - 1.0);
  for (int i = 0; i < N; ++i) r.tang[i] = slope * a.tang[i];
  return r;
}

template <typename T, int N>
Dual<T, N> sigmoid(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.value = sigmoid(a.value);
  const T slope = r.value * (1.0 - r.value);
  for (int i = 0; i < N; ++i) r.tang[i] = slope * a.tang[i];
  return r;
}

template <typename T, int N>
Dual<T, N> softplus(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.value = softplus(a.value);
  const T slope = sigmoid(a.value);
  for (int i = 0; i < N; ++i) r.tang[i] = slope * a.tang[i];
  return r;
}

template <typename T, int N>
Dual<T, N> macaulay(const Dual<T, N>& a) {
  if (value_of(a) > 0.0) return a;
  return Dual<T, N>(0.0);
}

inline bool isfinite_scalar(double x) { return std::isfinite(x); }

template <typename T, int N>
bool isfinite_scalar(const Dual<T, N>& a) {
  if (!isfinite_scalar(a.value)) return false;
  for (int i = 0; i < N; ++i)
    if (!isfinite_scalar(a.tang[i])) return false;
  return true;
}

// First partials of a scalar function of k reals (k <= kMaxSeedDim) by one
// forward pass with k seed directions.
inline constexpr int kMaxSeedDim = 12;

template <int K, typename F>
std::array<double, K> gradient_of(F&& f, const std::array<double, K>& x) {
  static_assert(K <= kMaxSeedDim, "seed dimension exceeds configured maximum");
  std::array<Dual<double, K>, K> xd;
  for (int i = 0; i < K; ++i) xd[i] = Dual<double, K>::seeded(x[i], i);
  const Dual<double, K> y = f(xd);
  std::array<double, K> g;
  for (int i = 0; i < K; ++i) g[i] = y.tang[i];
  return g;
}

}  // namespace gedfem
