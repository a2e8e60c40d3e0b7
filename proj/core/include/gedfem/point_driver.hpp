#pragma once

#include <vector>

#include "gedfem/material.hpp"
#include "gedfem/return_map.hpp"

namespace gedfem {

// Local (no non-local field) uniaxial driver under incompressible kinematics
// F = diag(l, 1/sqrt(l), 1/sqrt(l)). The nominal stress is the derivative of
// the degraded energy along that path, which is the standard uniaxial nominal
// stress of an incompressible specimen.
struct UniaxialSample {
  double stretch = 1.0;
  double nominal_stress = 0.0;  // d(f_d psi_e)/d stretch (MPa)
  double p11 = 0.0;             // PK1 axial component at fixed kappa (MPa)
  double kappa = 0.0;
  double damage = 0.0;
};

template <typename T>
Tensor2<T> uniaxial_deformation(const T& stretch) {
  const T lat = pow(stretch, -0.5);
  return Tensor2<T>::diag(stretch, lat, lat);
}

std::vector<UniaxialSample> uniaxial_local_response(const MaterialModel& m,
                                                    const std::vector<double>& stretches);

// Evenly spaced stretch ramp 1 -> stretch_max (inclusive), n points.
std::vector<double> stretch_ramp(double stretch_max, int n);

}  // namespace gedfem
