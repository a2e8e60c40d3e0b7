#pragma once

#include <variant>

#include "gedfem/errors.hpp"
#include "gedfem/networks.hpp"
#include "gedfem/tensor.hpp"

namespace gedfem {

// Damage parameters shared by both constitutive variants.
//   eta_d   saturation rate (1/MPa)      kappa_d  damage threshold (MPa)
//   c_d     gradient parameter (mm^2/MPa) beta_d  penalty parameter (1/MPa)
//   gamma_d scale on the non-local part of the driving force (default 1, which
//           makes the loading function reduce to q - kappa for both variants)
struct ClosedFormParams {
  double mu_e = 1.0;
  double lambda_e = 1.0;
  double eta_d = 1.0;
  double kappa_d = 0.0;
  double c_d = 0.0;
  double beta_d = 0.0;
  double gamma_d = 1.0;

  static ClosedFormParams from_youngs(double e_mod, double nu, double eta_d, double kappa_d,
                                      double c_d = 0.0, double beta_d = 0.0, double gamma_d = 1.0);
};

struct DataDrivenParams {
  double mu_e = 1.0;
  double lambda_e = 1.0;
  double eta_d = 1.0;
  double kappa_d = 0.0;
  double c_d = 0.0;
  double beta_d = 0.0;
  double gamma_d = 1.0;
  IcnnWeights psi_iso_net;
  MonotoneNetWeights yield_net;
};

// Tagged union of the two constitutive variants.
class MaterialModel {
 public:
  MaterialModel() : v_(ClosedFormParams{}) {}
  explicit MaterialModel(ClosedFormParams p) : v_(p) {}
  explicit MaterialModel(DataDrivenParams p) : v_(std::move(p)) {}

  bool is_closed_form() const { return std::holds_alternative<ClosedFormParams>(v_); }
  const ClosedFormParams& closed_form() const { return std::get<ClosedFormParams>(v_); }
  const DataDrivenParams& data_driven() const { return std::get<DataDrivenParams>(v_); }

  double mu_e() const { return is_closed_form() ? closed_form().mu_e : data_driven().mu_e; }
  double lambda_e() const {
    return is_closed_form() ? closed_form().lambda_e : data_driven().lambda_e;
  }
  double eta_d() const { return is_closed_form() ? closed_form().eta_d : data_driven().eta_d; }
  double kappa_d() const {
    return is_closed_form() ? closed_form().kappa_d : data_driven().kappa_d;
  }
  double c_d() const { return is_closed_form() ? closed_form().c_d : data_driven().c_d; }
  double beta_d() const { return is_closed_form() ? closed_form().beta_d : data_driven().beta_d; }
  double gamma_d() const {
    return is_closed_form() ? closed_form().gamma_d : data_driven().gamma_d;
  }

 private:
  std::variant<ClosedFormParams, DataDrivenParams> v_;
};

// Whether the non-local field enters the energy and the driving force.
// local_only realizes the limit q = q_loc with no phi coupling.
enum class Coupling { nonlocal, local_only };

// Degradation floor: f_d below this marks the point as failed (d > 0.995).
inline constexpr double kDegradationFloor = 5e-3;

// ---- energies (templated so Dual scalars flow through) ----

namespace detail {

// det C is shared between the volumetric terms and the non-local metric.
template <typename T>
T neo_hookean_energy_det(const Tensor2<T>& c, const T& det_c, double mu_e, double lambda_e) {
  if (!(value_of(det_c) > 0.0)) throw ConstitutiveError("neo_hookean_energy: det C <= 0");
  const T ln_j = 0.5 * log(det_c);
  return 0.5 * mu_e * (trace(c) - 3.0) - mu_e * ln_j + 0.5 * lambda_e * ln_j * ln_j;
}

template <typename T>
T datadriven_energy_det(const Tensor2<T>& c, const T& det_c, const DataDrivenParams& p) {
  if (!(value_of(det_c) > 0.0)) throw ConstitutiveError("datadriven_energy: det C <= 0");
  const T i1 = trace(c);
  const T i2 = trace(cofactor(c));
  const T jv = sqrt(det_c);
  const T i1g = pow(jv, -2.0 / 3.0) * i1;
  const T i2g = i2 * i2 * i2 / (9.0 * det_c * det_c);
  const T psi_iso = icnn_eval(p.psi_iso_net, i1g, i2g);
  const double psi_iso_ref = icnn_eval(p.psi_iso_net, 3.0, 3.0);
  const T vol = jv + 1.0 / jv - 2.0;
  return p.mu_e * (psi_iso - psi_iso_ref) + p.lambda_e * vol * vol;
}

template <typename T>
T elastic_energy_det(const Tensor2<T>& c, const T& det_c, const MaterialModel& m) {
  if (m.is_closed_form())
    return neo_hookean_energy_det(c, det_c, m.closed_form().mu_e, m.closed_form().lambda_e);
  return datadriven_energy_det(c, det_c, m.data_driven());
}

}  // namespace detail

// Compressible neo-Hookean strain energy, zero at C = I.
template <typename T>
T neo_hookean_energy(const Tensor2<T>& c, double mu_e, double lambda_e) {
  return detail::neo_hookean_energy_det(c, determinant(c), mu_e, lambda_e);
}

// Data-driven split: mu_e * (psi_iso(I1G,I2G) - psi_iso(3,3)) + lambda_e * (J + 1/J - 2)^2.
// The normalization makes the energy vanish identically at C = I.
template <typename T>
T datadriven_energy(const Tensor2<T>& c, const DataDrivenParams& p) {
  return detail::datadriven_energy_det(c, determinant(c), p);
}

// Undamaged strain energy density per variant.
template <typename T>
T elastic_energy(const Tensor2<T>& c, const MaterialModel& m) {
  return detail::elastic_energy_det(c, determinant(c), m);
}

// f_d(kappa) = exp(-eta_d <kappa - kappa_d>+) = 1 - d.
template <typename T>
T degradation_factor(const T& kappa, double eta_d, double kappa_d) {
  return exp(-eta_d * macaulay(kappa - kappa_d));
}

struct LocalState {
  double kappa = 0.0;
  double d = 0.0;
  double f_d = 1.0;
};

// d is always recomputed from kappa; it is never stored independently.
LocalState degradation(double kappa, double eta_d, double kappa_d);

// Free energy density Psi_int = f_d(kappa) psi_e(C)
//   + c_d/2 grad_phi . C^{-1} . grad_phi + beta_d/2 (phi - kappa)^2.
template <typename T>
T internal_energy(const Tensor2<T>& f, const T& phi, const Vec3<T>& grad_phi, const T& kappa,
                  const MaterialModel& m, Coupling coupling = Coupling::nonlocal) {
  {
    // inverted-element guard on the value part (det C alone cannot see it)
    Tensor2d f_val;
    for (int i = 0; i < 9; ++i) f_val.e[i] = value_of(f.e[i]);
    if (!(determinant(f_val) > 0.0)) throw ConstitutiveError("internal_energy: det F <= 0");
  }
  const Tensor2<T> c = right_cauchy_green(f);
  const T det_c = determinant(c);
  const T fd = degradation_factor(kappa, m.eta_d(), m.kappa_d());
  T psi = fd * detail::elastic_energy_det(c, det_c, m);
  if (coupling == Coupling::nonlocal) {
    if (m.c_d() != 0.0) {
      // grad . C^{-1} grad = grad . cof(C)^T grad / det C
      const Tensor2<T> cof_c = cofactor(c);
      Vec3<T> w;
      for (int i = 0; i < 3; ++i)
        w[i] = cof_c(0, i) * grad_phi[0] + cof_c(1, i) * grad_phi[1] + cof_c(2, i) * grad_phi[2];
      psi += (0.5 * m.c_d()) * dot(grad_phi, w) / det_c;
    }
    const T mismatch = phi - kappa;
    psi += (0.5 * m.beta_d()) * mismatch * mismatch;
  }
  return psi;
}

// Driving force conjugate to d: q = psi_e(C) + gamma_d beta_d (phi - kappa) / (eta_d f_d).
// Below threshold f_d = 1, which is the right-limit convention at kappa_d.
template <typename T>
T driving_force(const Tensor2<T>& f, const T& phi, const Vec3<T>& grad_phi, const T& kappa,
                const MaterialModel& m, Coupling coupling = Coupling::nonlocal) {
  (void)grad_phi;
  const Tensor2<T> c = right_cauchy_green(f);
  T q = elastic_energy(c, m);
  if (coupling == Coupling::nonlocal && m.beta_d() != 0.0) {
    const T fd = degradation_factor(kappa, m.eta_d(), m.kappa_d());
    if (value_of(fd) < kDegradationFloor)
      throw ConstitutiveError("driving_force: degradation underflow (point failed)");
    q += m.gamma_d() * m.beta_d() * (phi - kappa) / (m.eta_d() * fd);
  }
  return q;
}

// ---- double-valued convenience wrappers (autodiff inside) ----

Tensor2d pk1_stress(const Tensor2d& f, double phi, const Vec3d& grad_phi, double kappa,
                    const MaterialModel& m, Coupling coupling = Coupling::nonlocal);

struct NonlocalConjugates {
  Vec3d y_vec;   // d psi_grad / d grad_phi  (MPa mm)
  double y_scl;  // -d psi_plty / d phi      (MPa)
};

NonlocalConjugates nonlocal_conjugates(const Tensor2d& f, double phi, const Vec3d& grad_phi,
                                       double kappa, const MaterialModel& m);

// Cauchy stress sigma = J^{-1} P F^T.
Tensor2d cauchy_stress(const Tensor2d& f, const Tensor2d& p);
double von_mises(const Tensor2d& sigma);

}  // namespace gedfem
