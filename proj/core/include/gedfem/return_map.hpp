#pragma once

#include "gedfem/material.hpp"

namespace gedfem {

// Dissipation potential Phi_d = G(q) - kappa with G = identity (closed form,
// gamma_d = 1) or G = N_kappa (data-driven).
template <typename T>
T yield_function(const Tensor2<T>& f, const T& phi, const Vec3<T>& grad_phi, const T& kappa,
                 const MaterialModel& m, Coupling coupling = Coupling::nonlocal) {
  const T q = driving_force(f, phi, grad_phi, kappa, m, coupling);
  if (m.is_closed_form()) return q - kappa;
  return monotone_eval(m.data_driven().yield_net, q) - kappa;
}

enum class ReturnMapStatus {
  elastic,        // trial state inside the yield surface, no flow
  converged,      // plastic step solved to tolerance
  no_bracket,     // geometric bracket growth exhausted
  max_iterations, // Newton/bisection budget exhausted; kappa_next = last iterate
  not_finite,     // NaN encountered in a Phi_d evaluation
};

struct ReturnMapResult {
  double kappa_next = 0.0;
  double delta_lambda = 0.0;
  double phi_d_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;  // dG/dq vanished at the solution
  ReturnMapStatus status = ReturnMapStatus::elastic;
};

struct ReturnMapControls {
  double tol_local = 1e-10;
  int max_iter = 100;
};

// Solves the KKT system by reducing it to the scalar equation
// Phi_d(kappa) = 0 on [kappa_n, inf), then recovering
// delta_lambda = (kappa_next - kappa_n) / (dG/dq). Safeguarded Newton with a
// bisection fallback inside a geometrically grown bracket.
ReturnMapResult return_map(const Tensor2d& f, double phi, const Vec3d& grad_phi, double kappa_n,
                           const MaterialModel& m, Coupling coupling = Coupling::nonlocal,
                           const ReturnMapControls& ctl = {});

// dPhi_d/dkappa at fixed fields, by a one-seed dual pass.
double yield_kappa_derivative(const Tensor2d& f, double phi, const Vec3d& grad_phi, double kappa,
                              const MaterialModel& m, Coupling coupling);

}  // namespace gedfem
