#include "gedfem/material.hpp"

namespace gedfem {

ClosedFormParams ClosedFormParams::from_youngs(double e_mod, double nu, double eta_d,
                                               double kappa_d, double c_d, double beta_d,
                                               double gamma_d) {
  ClosedFormParams p;
  p.mu_e = e_mod / (2.0 * (1.0 + nu));
  p.lambda_e = e_mod * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  p.eta_d = eta_d;
  p.kappa_d = kappa_d;
  p.c_d = c_d;
  p.beta_d = beta_d;
  p.gamma_d = gamma_d;
  return p;
}

LocalState degradation(double kappa, double eta_d, double kappa_d) {
  LocalState s;
  s.kappa = kappa;
  s.f_d = degradation_factor(kappa, eta_d, kappa_d);
  s.d = 1.0 - s.f_d;
  return s;
}

Tensor2d pk1_stress(const Tensor2d& f, double phi, const Vec3d& grad_phi, double kappa,
                    const MaterialModel& m, Coupling coupling) {
  using D = Dual<double, 9>;
  Tensor2<D> fd;
  for (int i = 0; i < 9; ++i) fd.e[i] = D::seeded(f.e[i], i);
  Vec3<D> gp{D(grad_phi[0]), D(grad_phi[1]), D(grad_phi[2])};
  const D psi = internal_energy(fd, D(phi), gp, D(kappa), m, coupling);
  Tensor2d p;
  for (int i = 0; i < 9; ++i) p.e[i] = psi.tang[i];
  return p;
}

NonlocalConjugates nonlocal_conjugates(const Tensor2d& f, double phi, const Vec3d& grad_phi,
                                       double kappa, const MaterialModel& m) {
  using D = Dual<double, 4>;
  Tensor2<D> fd;
  for (int i = 0; i < 9; ++i) fd.e[i] = D(f.e[i]);
  Vec3<D> gp;
  for (int i = 0; i < 3; ++i) gp[i] = D::seeded(grad_phi[i], i);
  const D psi = internal_energy(fd, D::seeded(phi, 3), gp, D(kappa), m, Coupling::nonlocal);
  NonlocalConjugates c;
  for (int i = 0; i < 3; ++i) c.y_vec[i] = psi.tang[i];
  c.y_scl = -psi.tang[3];
  return c;
}

Tensor2d cauchy_stress(const Tensor2d& f, const Tensor2d& p) {
  const double j = determinant(f);
  return (1.0 / j) * (p * transpose(f));
}

double von_mises(const Tensor2d& s) {
  const double d01 = s(0, 0) - s(1, 1);
  const double d12 = s(1, 1) - s(2, 2);
  const double d20 = s(2, 2) - s(0, 0);
  const double shear = s(0, 1) * s(0, 1) + s(1, 2) * s(1, 2) + s(2, 0) * s(2, 0);
  return std::sqrt(0.5 * (d01 * d01 + d12 * d12 + d20 * d20) + 3.0 * shear);
}

}  // namespace gedfem
