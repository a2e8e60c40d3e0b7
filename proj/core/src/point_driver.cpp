#include "gedfem/point_driver.hpp"

namespace gedfem {

std::vector<UniaxialSample> uniaxial_local_response(const MaterialModel& m,
                                                    const std::vector<double>& stretches) {
  std::vector<UniaxialSample> out;
  out.reserve(stretches.size());
  double kappa = 0.0;
  const Vec3d no_grad;
  for (double stretch : stretches) {
    const Tensor2d f = uniaxial_deformation(stretch);
    const ReturnMapResult rm = return_map(f, kappa, no_grad, kappa, m, Coupling::local_only);
    if (!rm.converged) throw ConstitutiveError("uniaxial driver: local update failed");
    kappa = rm.kappa_next;
    const LocalState ls = degradation(kappa, m.eta_d(), m.kappa_d());

    using D1 = Dual<double, 1>;
    const Tensor2<D1> fd = uniaxial_deformation(D1::seeded(stretch, 0));
    const D1 psi = elastic_energy(right_cauchy_green(fd), m);

    UniaxialSample s;
    s.stretch = stretch;
    s.kappa = kappa;
    s.damage = ls.d;
    s.nominal_stress = ls.f_d * psi.tang[0];
    s.p11 = pk1_stress(f, kappa, no_grad, kappa, m, Coupling::local_only)(0, 0);
    out.push_back(s);
  }
  return out;
}

std::vector<double> stretch_ramp(double stretch_max, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = 1.0 + (stretch_max - 1.0) * double(i + 1) / double(n);
  return r;
}

}  // namespace gedfem
