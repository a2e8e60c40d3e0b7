#pragma once

#include <string>
#include <vector>

#include "gedfem/fem.hpp"

namespace gedfem {

// Fixed-column CSV, one row per committed step, 17 significant digits.
inline constexpr const char* kHistoryHeader =
    "step,load_factor,prescribed_displacement,reaction_force,max_s11,max_kappa,max_d,max_phi";

void write_history(const std::vector<HistoryRow>& rows, const std::string& path);
std::vector<HistoryRow> read_history(const std::string& path);

}  // namespace gedfem
