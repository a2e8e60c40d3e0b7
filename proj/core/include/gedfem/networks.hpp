#pragma once

#include <array>
#include <string>
#include <type_traits>
#include <vector>

#include "gedfem/dual.hpp"
#include "gedfem/errors.hpp"

namespace gedfem {

// Physics-augmented networks. Architectures are fixed: two inputs, two hidden
// layers of width 8, one output for the isochoric energy; one input for the
// yield map. Stored matrices are the *effective* weights: passthrough blocks
// must be entrywise non-negative (the trainer reaches this by squaring an
// unconstrained raw parameterization before export).
//
// The weight scalar WT is double everywhere except inside the trainer, where
// dual-valued weights carry loss gradients.

inline constexpr int kNetHiddenWidth = 8;

namespace detail {
// weight * input and weight + input with cheap mixed arithmetic when the
// weights are plain doubles
template <typename WT, typename T>
T wmul(const WT& w, const T& x) {
  if constexpr (std::is_same_v<WT, double>)
    return w * x;
  else
    return T(w) * x;
}
template <typename WT, typename T>
T wadd(const WT& w, const T& x) {
  if constexpr (std::is_same_v<WT, double>)
    return x + w;
  else
    return T(w) + x;
}
}  // namespace detail

// Input-convex network for psi_iso(I1G, I2G):
//   z1  = softplus(Wx1 x + b1)
//   z2  = softplus(Wz1 z1 + Wx2 x + b2)     Wz1 >= 0
//   out = Wz2 z2 + Wx3 x + b3               Wz2 >= 0
template <typename WT>
struct IcnnWeightsT {
  std::array<std::array<WT, 2>, kNetHiddenWidth> wx1{};
  std::array<WT, kNetHiddenWidth> b1{};
  std::array<std::array<WT, kNetHiddenWidth>, kNetHiddenWidth> wz1{};
  std::array<std::array<WT, 2>, kNetHiddenWidth> wx2{};
  std::array<WT, kNetHiddenWidth> b2{};
  std::array<WT, kNetHiddenWidth> wz2{};
  std::array<WT, 2> wx3{};
  WT b3{};

  void validate() const {
    for (int i = 0; i < kNetHiddenWidth; ++i)
      for (int j = 0; j < kNetHiddenWidth; ++j)
        if (wz1[i][j] < 0.0)
          throw WeightConstraintError("psi_iso passthrough weight wz1[" + std::to_string(i) +
                                      "][" + std::to_string(j) + "] is negative");
    for (int j = 0; j < kNetHiddenWidth; ++j)
      if (wz2[j] < 0.0)
        throw WeightConstraintError("psi_iso passthrough weight wz2[" + std::to_string(j) +
                                    "] is negative");
  }
};

using IcnnWeights = IcnnWeightsT<double>;

// Monotone non-decreasing scalar map N_kappa(q):
//   h1  = softplus(W1 q + b1)                 W1 >= 0
//   h2  = softplus(W2 h1 + b2)                W2 >= 0
//   raw = W3 h2 + a0 q + b0                   W3, a0 >= 0
//   N   = raw(q) - raw(0)                     so the virgin state is elastic
template <typename WT>
struct MonotoneNetWeightsT {
  std::array<WT, kNetHiddenWidth> w1{};
  std::array<WT, kNetHiddenWidth> b1{};
  std::array<std::array<WT, kNetHiddenWidth>, kNetHiddenWidth> w2{};
  std::array<WT, kNetHiddenWidth> b2{};
  std::array<WT, kNetHiddenWidth> w3{};
  WT a0{};
  WT b0{};

  void validate() const {
    for (int i = 0; i < kNetHiddenWidth; ++i)
      if (w1[i] < 0.0)
        throw WeightConstraintError("yield weight w1[" + std::to_string(i) + "] is negative");
    for (int i = 0; i < kNetHiddenWidth; ++i)
      for (int j = 0; j < kNetHiddenWidth; ++j)
        if (w2[i][j] < 0.0)
          throw WeightConstraintError("yield weight w2[" + std::to_string(i) + "][" +
                                      std::to_string(j) + "] is negative");
    for (int j = 0; j < kNetHiddenWidth; ++j)
      if (w3[j] < 0.0)
        throw WeightConstraintError("yield weight w3[" + std::to_string(j) + "] is negative");
    if (a0 < 0.0) throw WeightConstraintError("yield skip coefficient a0 is negative");
  }

  // The identity map N(q) = q; reproduces the closed-form yield function.
  static MonotoneNetWeightsT identity() {
    MonotoneNetWeightsT w{};
    w.a0 = WT(1.0);
    w.b0 = WT(0.0);
    return w;
  }
};

using MonotoneNetWeights = MonotoneNetWeightsT<double>;

template <typename WT, typename T>
T icnn_eval(const IcnnWeightsT<WT>& w, const T& i1g, const T& i2g) {
  using detail::wadd;
  using detail::wmul;
  std::array<T, kNetHiddenWidth> z1;
  for (int i = 0; i < kNetHiddenWidth; ++i)
    z1[i] = softplus(wadd(w.b1[i], wmul(w.wx1[i][0], i1g) + wmul(w.wx1[i][1], i2g)));
  std::array<T, kNetHiddenWidth> z2;
  for (int i = 0; i < kNetHiddenWidth; ++i) {
    T acc = wadd(w.b2[i], wmul(w.wx2[i][0], i1g) + wmul(w.wx2[i][1], i2g));
    for (int j = 0; j < kNetHiddenWidth; ++j) acc += wmul(w.wz1[i][j], z1[j]);
    z2[i] = softplus(acc);
  }
  T out = wadd(w.b3, wmul(w.wx3[0], i1g) + wmul(w.wx3[1], i2g));
  for (int j = 0; j < kNetHiddenWidth; ++j) out += wmul(w.wz2[j], z2[j]);
  return out;
}

template <typename WT, typename T>
T monotone_raw_eval(const MonotoneNetWeightsT<WT>& w, const T& q) {
  using detail::wadd;
  using detail::wmul;
  std::array<T, kNetHiddenWidth> h1;
  for (int i = 0; i < kNetHiddenWidth; ++i) h1[i] = softplus(wadd(w.b1[i], wmul(w.w1[i], q)));
  std::array<T, kNetHiddenWidth> h2;
  for (int i = 0; i < kNetHiddenWidth; ++i) {
    T acc = wadd(w.b2[i], T(0.0));
    for (int j = 0; j < kNetHiddenWidth; ++j) acc += wmul(w.w2[i][j], h1[j]);
    h2[i] = softplus(acc);
  }
  T out = wadd(w.b0, wmul(w.a0, q));
  for (int j = 0; j < kNetHiddenWidth; ++j) out += wmul(w.w3[j], h2[j]);
  return out;
}

template <typename WT, typename T>
T monotone_eval(const MonotoneNetWeightsT<WT>& w, const T& q) {
  // The offset at q = 0 is theta-dependent, so it must flow through the same
  // scalar type as the weights.
  if constexpr (std::is_same_v<WT, double>)
    return monotone_raw_eval(w, q) - monotone_raw_eval(w, 0.0);
  else
    return monotone_raw_eval(w, q) - T(monotone_raw_eval(w, WT(0.0)));
}

}  // namespace gedfem
