#include "gedfem/fem.hpp"

#include <cmath>

#include "gedfem/kernel.hpp"

namespace gedfem {

namespace {
constexpr double kXiSign[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                  {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
}

ShapeEval shape_functions(const Vec3d& xi) {
  ShapeEval s;
  for (int a = 0; a < kNodesPerElem; ++a) {
    const double gx = kXiSign[a][0], gy = kXiSign[a][1], gz = kXiSign[a][2];
    const double fx = 1.0 + gx * xi[0];
    const double fy = 1.0 + gy * xi[1];
    const double fz = 1.0 + gz * xi[2];
    s.n[a] = 0.125 * fx * fy * fz;
    s.dndxi[a] = {0.125 * gx * fy * fz, 0.125 * fx * gy * fz, 0.125 * fx * fy * gz};
  }
  return s;
}

const std::array<QuadPoint, kQuadPerElem>& gauss_2x2x2() {
  static const std::array<QuadPoint, kQuadPerElem> pts = [] {
    std::array<QuadPoint, kQuadPerElem> p;
    const double g = 1.0 / std::sqrt(3.0);
    int q = 0;
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
          p[q++] = QuadPoint{Vec3d((2 * i - 1) * g, (2 * j - 1) * g, (2 * k - 1) * g), 1.0};
    return p;
  }();
  return pts;
}

namespace detail {

QuadGeometry quad_geometry(const std::array<std::array<double, 3>, kNodesPerElem>& coords,
                           int q) {
  const QuadPoint& qp = gauss_2x2x2()[q];
  const ShapeEval s = shape_functions(qp.xi);

  Tensor2d jac;  // dX/dxi
  for (int a = 0; a < kNodesPerElem; ++a)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) jac(i, j) += coords[a][i] * s.dndxi[a][j];
  const double detj = determinant(jac);
  if (!(detj > 0.0)) throw ConstitutiveError("element geometry: non-positive reference Jacobian");
  const Tensor2d inv_jac = inverse(jac);

  QuadGeometry g;
  g.n = s.n;
  g.weight = detj * qp.weight;
  for (int a = 0; a < kNodesPerElem; ++a)
    for (int k = 0; k < 3; ++k) {
      double acc = 0.0;
      for (int j = 0; j < 3; ++j) acc += s.dndxi[a][j] * inv_jac(j, k);
      g.dndx[a][k] = acc;
    }
  for (int d = 0; d < 3; ++d) {
    double acc = 0.0;
    for (int a = 0; a < kNodesPerElem; ++a) acc += s.n[a] * coords[a][d];
    g.x_ref[d] = acc;
  }
  return g;
}

}  // namespace detail

ElementSystem element_system(const std::array<std::array<double, 3>, kNodesPerElem>& coords,
                             const std::array<double, 24>& u_e, const std::array<double, 8>& phi_e,
                             const std::array<double, kQuadPerElem>& kappa_in,
                             const MaterialModel& material, Coupling coupling,
                             const KernelControls& ctl,
                             const std::function<double(const Vec3d&)>* kappa_d_field) {
  using S = Dual<double, kElemDofs>;
  std::array<S, 24> u_s;
  for (int i = 0; i < 24; ++i) u_s[i] = S::seeded(u_e[i], i);
  std::array<S, 8> phi_s;
  for (int a = 0; a < 8; ++a) phi_s[a] = S::seeded(phi_e[a], 24 + a);

  const KernelResult<S> kr =
      element_kernel(coords, u_s, phi_s, kappa_in, material, coupling, ctl, kappa_d_field);

  ElementSystem out;
  out.kappa = kr.kappa;
  for (int i = 0; i < 24; ++i) out.r_u[i] = kr.r[i].value;
  for (int a = 0; a < 8; ++a) out.r_phi[a] = kr.r[24 + a].value;
  for (int i = 0; i < kElemDofs; ++i)
    for (int j = 0; j < kElemDofs; ++j) out.k[i][j] = kr.r[i].tang[j];
  return out;
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "monolithic") return Scheme::monolithic;
  if (s == "staggered") return Scheme::staggered;
  if (s == "local" || s == "local-only" || s == "local_only") return Scheme::local_only;
  throw ParseError("unknown scheme '" + s + "' (expected monolithic|staggered|local)");
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::monolithic: return "monolithic";
    case Scheme::staggered: return "staggered";
    case Scheme::local_only: return "local";
  }
  return "?";
}

std::vector<double> element_kappa(const Problem& p, const SystemState& s) {
  std::vector<double> out(p.mesh.element_count(), 0.0);
  for (int e = 0; e < p.mesh.element_count(); ++e) {
    double acc = 0.0;
    for (int q = 0; q < kQuadPerElem; ++q) acc += s.history.committed_at(e, q);
    out[e] = acc / kQuadPerElem;
  }
  return out;
}

std::vector<double> element_damage(const Problem& p, const SystemState& s) {
  std::vector<double> kap = element_kappa(p, s);
  std::vector<double> out(kap.size());
  for (std::size_t e = 0; e < kap.size(); ++e)
    out[e] = degradation(kap[e], p.material.eta_d(), p.material.kappa_d()).d;
  return out;
}

}  // namespace gedfem
