#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "gedfem/kernel.hpp"
#include "gedfem/solver.hpp"

namespace gedfem {

ConstraintSet resolve_constraints(const Problem& p, const DofMap& dofs, Scheme scheme) {
  ConstraintSet cs;
  const int n = dofs.dof_count();
  cs.constrained.assign(n, 0);
  cs.fixed.assign(n, 0.0);
  cs.ramp.assign(n, 0.0);
  for (const DirichletBC& bc : p.dirichlet) {
    if (bc.dof < 0 || bc.dof > 3)
      throw ParseError("boundary condition: dof index must be 0..3");
    for (int node : p.mesh.node_set(bc.node_set)) {
      const int dof = kDofsPerNode * node + bc.dof;
      cs.constrained[dof] = 1;
      if (bc.ramped) {
        cs.ramp[dof] = bc.value;
      } else {
        cs.fixed[dof] = bc.value;
      }
    }
  }
  // the phi field is dropped in the local-only scheme and whenever the
  // material has no non-local terms (its equation block would be empty)
  const bool no_field = p.material.beta_d() == 0.0 && p.material.c_d() == 0.0;
  if (scheme == Scheme::local_only || no_field) {
    for (int node = 0; node < dofs.n_nodes; ++node) {
      const int dof = dofs.phi_dof(node);
      cs.constrained[dof] = 1;
      cs.fixed[dof] = 0.0;
      cs.ramp[dof] = 0.0;
    }
  }
  for (int i = 0; i < n; ++i)
    if (cs.constrained[i] && cs.ramp[i] != 0.0) {
      cs.ramped_dofs.push_back(i);
      cs.ramp_magnitude = std::max(cs.ramp_magnitude, std::abs(cs.ramp[i]));
    }
  return cs;
}

std::vector<double> reference_external_force(const Problem& p, const DofMap& dofs) {
  std::vector<double> f(dofs.dof_count(), 0.0);
  // 2x2 Gauss on each loaded face, dead load per reference area
  const double g = 1.0 / std::sqrt(3.0);
  const double gp[4][2] = {{-g, -g}, {g, -g}, {g, g}, {-g, g}};
  for (const TractionBC& t : p.tractions) {
    for (const Mesh::Face& face : p.mesh.faces_in_node_set(t.node_set)) {
      std::array<std::array<double, 3>, 4> x;
      for (int a = 0; a < 4; ++a) x[a] = p.mesh.nodes[face.nodes[a]];
      for (const auto& q : gp) {
        const double xi = q[0], eta = q[1];
        const double n[4] = {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
                             0.25 * (1 + xi) * (1 + eta), 0.25 * (1 - xi) * (1 + eta)};
        const double dxi[4] = {-0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta),
                               -0.25 * (1 + eta)};
        const double deta[4] = {-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi),
                                0.25 * (1 - xi)};
        double t1[3] = {0, 0, 0}, t2[3] = {0, 0, 0};
        for (int a = 0; a < 4; ++a)
          for (int d = 0; d < 3; ++d) {
            t1[d] += dxi[a] * x[a][d];
            t2[d] += deta[a] * x[a][d];
          }
        const double cx = t1[1] * t2[2] - t1[2] * t2[1];
        const double cy = t1[2] * t2[0] - t1[0] * t2[2];
        const double cz = t1[0] * t2[1] - t1[1] * t2[0];
        const double da = std::sqrt(cx * cx + cy * cy + cz * cz);
        for (int a = 0; a < 4; ++a)
          for (int d = 0; d < 3; ++d)
            f[dofs.u_dof(face.nodes[a], d)] += n[a] * t.traction[d] * da;
      }
    }
  }
  return f;
}

namespace {

struct ElementWorkspace {
  std::array<std::array<double, 3>, kNodesPerElem> coords;
  std::array<double, 24> u_e;
  std::array<double, 8> phi_e;
  std::array<double, kQuadPerElem> kappa_in;
};

ElementWorkspace gather_element(const Problem& p, const DofMap&, const SystemState& state,
                                int e, Scheme scheme) {
  ElementWorkspace w;
  const auto& conn = p.mesh.elements[e];
  for (int a = 0; a < kNodesPerElem; ++a) {
    w.coords[a] = p.mesh.nodes[conn[a]];
    for (int d = 0; d < 3; ++d) w.u_e[3 * a + d] = state.u[std::size_t(conn[a]) * 3 + d];
    w.phi_e[a] = state.phi[conn[a]];
  }
  for (int q = 0; q < kQuadPerElem; ++q) {
    const std::size_t idx = std::size_t(e) * kQuadPerElem + q;
    w.kappa_in[q] = scheme == Scheme::monolithic ? state.history.committed[idx]
                                                 : state.history.trial[idx];
  }
  return w;
}

Coupling coupling_of(Scheme scheme) {
  return scheme == Scheme::local_only ? Coupling::local_only : Coupling::nonlocal;
}

}  // namespace

AssemblyOutput assemble(const Problem& p, const DofMap& dofs, const SystemState& state,
                        double gamma, const std::vector<double>& f_ref, Scheme scheme,
                        const SolverConfig& cfg, bool with_tangent) {
  const int ne = p.mesh.element_count();
  AssemblyOutput out;
  out.residual.assign(dofs.dof_count(), 0.0);

  KernelControls ctl;
  ctl.scheme = scheme;
  ctl.local.tol_local = cfg.local_tol;
  ctl.local.max_iter = cfg.local_max_iter;
  const Coupling coupling = coupling_of(scheme);
  const std::function<double(const Vec3d&)>* kd_field =
      p.kappa_d_scale ? &p.kappa_d_scale : nullptr;

  struct ElementOut {
    ElementSystem sys;        // with_tangent
    std::array<double, kElemDofs> r;  // residual-only
    bool failed = false;
    std::string error;
  };
  std::vector<ElementOut> results(ne);

  auto process = [&](int e) {
    try {
      const ElementWorkspace w = gather_element(p, dofs, state, e, scheme);
      if (with_tangent) {
        results[e].sys = element_system(w.coords, w.u_e, w.phi_e, w.kappa_in, p.material,
                                        coupling, ctl, kd_field);
      } else {
        const KernelResult<double> kr = element_kernel<double>(
            w.coords, w.u_e, w.phi_e, w.kappa_in, p.material, coupling, ctl, kd_field);
        results[e].r = kr.r;
      }
    } catch (const ConstitutiveError& err) {
      results[e].failed = true;
      results[e].error = err.what();
    } catch (const SingularTensorError& err) {
      results[e].failed = true;
      results[e].error = err.what();
    }
  };

  const int n_threads = std::max(1, cfg.threads);
  if (n_threads == 1 || ne < 2 * n_threads) {
    for (int e = 0; e < ne; ++e) process(e);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (int e = next.fetch_add(1); e < ne; e = next.fetch_add(1)) process(e);
      });
    for (auto& th : pool) th.join();
  }

  // Deterministic scatter in element order.
  if (with_tangent) out.tangent.reserve(std::size_t(ne) * kElemDofs * kElemDofs);
  std::array<int, kElemDofs> gdof;
  for (int e = 0; e < ne; ++e) {
    if (results[e].failed) {
      out.failed_elements.push_back(e);
      if (out.first_error.empty()) out.first_error = results[e].error;
      continue;
    }
    const auto& conn = p.mesh.elements[e];
    for (int a = 0; a < kNodesPerElem; ++a) {
      for (int d = 0; d < 3; ++d) gdof[3 * a + d] = dofs.u_dof(conn[a], d);
      gdof[24 + a] = dofs.phi_dof(conn[a]);
    }
    if (with_tangent) {
      const ElementSystem& sys = results[e].sys;
      for (int i = 0; i < 24; ++i) out.residual[gdof[i]] += sys.r_u[i];
      for (int a = 0; a < 8; ++a) out.residual[gdof[24 + a]] += sys.r_phi[a];
      for (int i = 0; i < kElemDofs; ++i)
        for (int j = 0; j < kElemDofs; ++j)
          if (sys.k[i][j] != 0.0) out.tangent.push_back({gdof[i], gdof[j], sys.k[i][j]});
    } else {
      for (int i = 0; i < kElemDofs; ++i) out.residual[gdof[i]] += results[e].r[i];
    }
  }
  out.ok = out.failed_elements.empty();

  if (gamma != 0.0 && !f_ref.empty())
    for (std::size_t i = 0; i < out.residual.size(); ++i)
      out.residual[i] -= gamma * f_ref[i];
  return out;
}

bool sweep_history(const Problem& p, SystemState& state, const SolverConfig& cfg) {
  const Coupling coupling = coupling_of(cfg.scheme);
  ReturnMapControls ctl{cfg.local_tol, cfg.local_max_iter};
  const DofMap dofs = DofMap::for_mesh(p.mesh);
  bool ok = true;
  for (int e = 0; e < p.mesh.element_count(); ++e) {
    const ElementWorkspace w = gather_element(p, dofs, state, e, Scheme::monolithic);
    for (int q = 0; q < kQuadPerElem; ++q) {
      detail::QuadGeometry g;
      try {
        g = detail::quad_geometry(w.coords, q);
      } catch (const ConstitutiveError&) {
        ok = false;
        continue;
      }
      Tensor2d f = Tensor2d::identity();
      for (int a = 0; a < kNodesPerElem; ++a)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) f(i, j) += w.u_e[3 * a + i] * g.dndx[a][j];
      double phi = 0.0;
      Vec3d gphi;
      for (int a = 0; a < kNodesPerElem; ++a) {
        phi += w.phi_e[a] * g.n[a];
        for (int j = 0; j < 3; ++j) gphi[j] += w.phi_e[a] * g.dndx[a][j];
      }
      const MaterialModel* mat = &p.material;
      MaterialModel scaled;
      if (p.kappa_d_scale) {
        const double s = p.kappa_d_scale(g.x_ref);
        if (s != 1.0) {
          if (p.material.is_closed_form()) {
            ClosedFormParams cp = p.material.closed_form();
            cp.kappa_d *= s;
            scaled = MaterialModel(cp);
          } else {
            DataDrivenParams dp = p.material.data_driven();
            dp.kappa_d *= s;
            scaled = MaterialModel(std::move(dp));
          }
          mat = &scaled;
        }
      }
      const std::size_t idx = std::size_t(e) * kQuadPerElem + q;
      try {
        const ReturnMapResult rm =
            return_map(f, phi, gphi, state.history.committed[idx], *mat, coupling, ctl);
        if (!rm.converged) {
          ok = false;
          continue;
        }
        state.history.trial[idx] = rm.kappa_next;
      } catch (const ConstitutiveError&) {
        ok = false;
      } catch (const SingularTensorError&) {
        ok = false;
      }
    }
  }
  return ok;
}

HistoryRow measure_state(const Problem& p, const SystemState& state, const ConstraintSet& bc,
                         const std::vector<double>& f_ref, double gamma, int step,
                         const SolverConfig& cfg) {
  HistoryRow row;
  row.step = step;
  row.load_factor = gamma;
  row.prescribed_displacement = gamma * bc.ramp_magnitude;

  const DofMap dofs = DofMap::for_mesh(p.mesh);
  const AssemblyOutput asm_out = assemble(p, dofs, state, gamma, f_ref, cfg.scheme, cfg, false);
  double reaction = 0.0;
  for (int dof : bc.ramped_dofs) {
    const double sign = bc.ramp[dof] >= 0.0 ? 1.0 : -1.0;
    reaction += sign * asm_out.residual[dof];
  }
  row.reaction_force = reaction;

  const Coupling coupling = coupling_of(cfg.scheme);
  for (int e = 0; e < p.mesh.element_count(); ++e) {
    const ElementWorkspace w = gather_element(p, dofs, state, e, Scheme::staggered);
    for (int q = 0; q < kQuadPerElem; ++q) {
      detail::QuadGeometry g;
      try {
        g = detail::quad_geometry(w.coords, q);
      } catch (const ConstitutiveError&) {
        continue;
      }
      Tensor2d f = Tensor2d::identity();
      for (int a = 0; a < kNodesPerElem; ++a)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) f(i, j) += w.u_e[3 * a + i] * g.dndx[a][j];
      double phi = 0.0;
      Vec3d gphi;
      for (int a = 0; a < kNodesPerElem; ++a) {
        phi += w.phi_e[a] * g.n[a];
        for (int j = 0; j < 3; ++j) gphi[j] += w.phi_e[a] * g.dndx[a][j];
      }
      const std::size_t idx = std::size_t(e) * kQuadPerElem + q;
      const double kappa = state.history.trial[idx];
      try {
        const Tensor2d pk1 = pk1_stress(f, phi, gphi, kappa, p.material, coupling);
        const Tensor2d sigma = cauchy_stress(f, pk1);
        row.max_s11 = std::max(row.max_s11, sigma(0, 0));
      } catch (const ConstitutiveError&) {
      } catch (const SingularTensorError&) {
      }
      row.max_kappa = std::max(row.max_kappa, kappa);
      row.max_d = std::max(row.max_d, degradation(kappa, p.material.eta_d(), p.material.kappa_d()).d);
    }
  }
  for (double v : state.phi) row.max_phi = std::max(row.max_phi, v);
  return row;
}

}  // namespace gedfem
