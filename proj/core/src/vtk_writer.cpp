#include "gedfem/vtk_writer.hpp"

#include <fstream>

#include "gedfem/kernel.hpp"

namespace gedfem {

void write_vtk(const Problem& p, const SystemState& state, Scheme scheme,
               const std::string& path) {
  const Mesh& mesh = p.mesh;
  const int ne = mesh.element_count();
  const Coupling coupling =
      scheme == Scheme::local_only ? Coupling::local_only : Coupling::nonlocal;

  std::vector<double> cell_d(ne, 0.0), cell_kappa(ne, 0.0), cell_vm(ne, 0.0);
  for (int e = 0; e < ne; ++e) {
    const auto& conn = mesh.elements[e];
    std::array<std::array<double, 3>, kNodesPerElem> coords;
    std::array<double, 24> u_e;
    std::array<double, 8> phi_e;
    for (int a = 0; a < kNodesPerElem; ++a) {
      coords[a] = mesh.nodes[conn[a]];
      for (int d = 0; d < 3; ++d) u_e[3 * a + d] = state.u[std::size_t(conn[a]) * 3 + d];
      phi_e[a] = state.phi[conn[a]];
    }
    double kap = 0.0, vm = 0.0;
    for (int q = 0; q < kQuadPerElem; ++q) {
      const detail::QuadGeometry g = detail::quad_geometry(coords, q);
      Tensor2d f = Tensor2d::identity();
      for (int a = 0; a < kNodesPerElem; ++a)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) f(i, j) += u_e[3 * a + i] * g.dndx[a][j];
      double phi = 0.0;
      Vec3d gphi;
      for (int a = 0; a < kNodesPerElem; ++a) {
        phi += phi_e[a] * g.n[a];
        for (int j = 0; j < 3; ++j) gphi[j] += phi_e[a] * g.dndx[a][j];
      }
      const double kappa = state.history.committed_at(e, q);
      kap += kappa / kQuadPerElem;
      const Tensor2d pk1 = pk1_stress(f, phi, gphi, kappa, p.material, coupling);
      vm += von_mises(cauchy_stress(f, pk1)) / kQuadPerElem;
    }
    cell_kappa[e] = kap;
    cell_d[e] = degradation(kap, p.material.eta_d(), p.material.kappa_d()).d;
    cell_vm[e] = vm;
  }

  std::ofstream out(path);
  if (!out) throw IoError("cannot open VTK file for writing: " + path);
  char buf[256];
  out << "# vtk DataFile Version 3.0\n";
  out << "gradient-enhanced damage state, step " << state.step << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";

  out << "POINTS " << mesh.node_count() << " double\n";
  for (const auto& n : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g\n", n[0], n[1], n[2]);
    out << buf;
  }
  out << "CELLS " << ne << " " << 9 * ne << "\n";
  for (const auto& c : mesh.elements) {
    out << "8";
    for (int a = 0; a < 8; ++a) out << " " << c[a];
    out << "\n";
  }
  out << "CELL_TYPES " << ne << "\n";
  for (int e = 0; e < ne; ++e) out << "12\n";

  out << "POINT_DATA " << mesh.node_count() << "\n";
  out << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < mesh.node_count(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g\n", state.phi[i]);
    out << buf;
  }
  out << "VECTORS displacement double\n";
  for (int i = 0; i < mesh.node_count(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g\n", state.u[std::size_t(i) * 3],
                  state.u[std::size_t(i) * 3 + 1], state.u[std::size_t(i) * 3 + 2]);
    out << buf;
  }

  out << "CELL_DATA " << ne << "\n";
  auto scalars = [&](const char* name, const std::vector<double>& v) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : v) {
      std::snprintf(buf, sizeof buf, "%.12g\n", x);
      out << buf;
    }
  };
  scalars("d", cell_d);
  scalars("kappa", cell_kappa);
  scalars("von_mises", cell_vm);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace gedfem
