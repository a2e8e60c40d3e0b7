#pragma once

#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "gedfem/material.hpp"

namespace gedfem {

// Random admissible states and valid network draws for property checks.
struct RandomState {
  Tensor2d f;
  double phi;
  Vec3d grad_phi;
  double kappa;
};

RandomState random_admissible_state(std::mt19937& rng, double deformation_scale = 0.3);
IcnnWeights random_icnn(std::mt19937& rng, double scale = 0.5);
MonotoneNetWeights random_monotone(std::mt19937& rng, double scale = 0.5);
ClosedFormParams random_closed_form(std::mt19937& rng);
DataDrivenParams random_data_driven(std::mt19937& rng);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Property suites behind the `verify` subcommand: dual-number derivatives vs
// central finite differences, network convexity/monotonicity, return-map KKT.
std::vector<CheckResult> run_selfchecks(unsigned seed, std::ostream* log = nullptr);

}  // namespace gedfem
