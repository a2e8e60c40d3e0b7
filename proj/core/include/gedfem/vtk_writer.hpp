#pragma once

#include <string>

#include "gedfem/fem.hpp"

namespace gedfem {

// Legacy-ASCII VTK unstructured grid: hexahedra (cell type 12), nodal phi and
// displacement as point data, per-element damage, kappa and von Mises Cauchy
// stress (quadrature averages) as cell data.
void write_vtk(const Problem& p, const SystemState& state, Scheme scheme,
               const std::string& path);

}  // namespace gedfem
