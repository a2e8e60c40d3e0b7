#pragma once

#include <string>
#include <vector>

#include "gedfem/material.hpp"

namespace gedfem {

// Uniaxial stress-stretch samples grouped into loading/unloading cycles,
// ordered in time. CSV format: header `cycle,stretch,stress`.
struct FitSample {
  int cycle = 0;
  double stretch = 1.0;
  double stress = 0.0;  // axial nominal stress (MPa)
};

struct FitDataset {
  std::vector<FitSample> samples;
  void validate() const;  // throws ParseError on non-positive stretches
};

FitDataset load_fit_csv(const std::string& path);
void save_fit_csv(const FitDataset& data, const std::string& path);

struct TrainConfig {
  double eta_d = 1.0;
  double kappa_d = 0.0;
  double lambda_e = 10.0;  // volumetric scale; inert on the isochoric path
  double mu_e = 0.0;       // 0 -> estimated from the initial slope
  double learning_rate = 1e-2;
  int epochs = 5000;
  double early_stop_loss = 0.0;  // absolute MSE threshold (MPa^2); 0 disables
  double target_rel_rmse = 0.03;
  unsigned seed = 1234;
  double c_d = 0.0;  // carried into the exported parameter set
  double beta_d = 0.0;
  double gamma_d = 1.0;
};

struct FitResult {
  DataDrivenParams params;
  double final_loss = 0.0;  // MSE through the exported public-eval path
  double rel_rmse = 0.0;    // RMSE / max |target stress|
  int epochs_run = 0;
  bool converged = false;
};

// Fits both networks to the dataset by full-batch Adam on an unconstrained
// raw parameterization (passthrough weights squared on export, so the
// constraints hold by construction). The prediction path is the local damage
// point driver under incompressible uniaxial kinematics.
FitResult fit(const FitDataset& data, const TrainConfig& cfg);

// Local-model prediction along a stretch history via the public evaluation path.
std::vector<double> predict_nominal_stress(const DataDrivenParams& p,
                                           const std::vector<double>& stretches);

}  // namespace gedfem
