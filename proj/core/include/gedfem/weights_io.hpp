#pragma once

#include <string>

#include "gedfem/material.hpp"

namespace gedfem {

// Weight files are JSON documents:
//   {"model_version": 1,
//    "psi_iso": {"layers": [...]},
//    "yield":   {"layers": [...], "a0": ..., "b0": ...},
//    "mu_e": ..., "lambda_e": ..., "eta_d": ..., "kappa_d": ...,
//    "c_d": ..., "beta_d": ..., "gamma_d": ...}
// Passthrough matrices are stored in effective (non-negative) form and
// validated on load. Round-tripping is bitwise exact.
void save_weights(const DataDrivenParams& p, const std::string& path);
DataDrivenParams load_weights(const std::string& path);

std::string weights_to_json(const DataDrivenParams& p);
DataDrivenParams weights_from_json(const std::string& text, const std::string& context);

}  // namespace gedfem
