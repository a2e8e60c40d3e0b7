#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gedfem/material.hpp"
#include "gedfem/mesh.hpp"

namespace gedfem {

inline constexpr int kNodesPerElem = 8;
inline constexpr int kQuadPerElem = 8;   // 2x2x2 Gauss
inline constexpr int kDofsPerNode = 4;   // ux uy uz phi
inline constexpr int kElemDofs = 32;

// ---- discretization ----

struct ShapeEval {
  std::array<double, kNodesPerElem> n;
  std::array<std::array<double, 3>, kNodesPerElem> dndxi;
};

// Trilinear HEX8 shape functions on [-1,1]^3.
ShapeEval shape_functions(const Vec3d& xi);

struct QuadPoint {
  Vec3d xi;
  double weight;
};

const std::array<QuadPoint, kQuadPerElem>& gauss_2x2x2();

// One displacement 3-vector plus one damage dof per node, interleaved.
struct DofMap {
  int n_nodes = 0;
  int dof_count() const { return kDofsPerNode * n_nodes; }
  int u_dof(int node, int comp) const { return kDofsPerNode * node + comp; }
  int phi_dof(int node) const { return kDofsPerNode * node + 3; }

  static DofMap for_mesh(const Mesh& m) { return DofMap{m.node_count()}; }
};

// ---- history and state ----

// Per quadrature point: committed kappa_n plus the working trial value.
// Trial moves during staggered sweeps / monolithic iterations; it reaches the
// committed slot only through commit(), and rollback() discards it.
struct QuadHistory {
  std::vector<double> committed;
  std::vector<double> trial;
  std::vector<uint8_t> failed;

  void resize(int n_elem) {
    committed.assign(std::size_t(n_elem) * kQuadPerElem, 0.0);
    trial = committed;
    failed.assign(std::size_t(n_elem) * kQuadPerElem, 0);
  }
  void commit() { committed = trial; }
  void rollback() { trial = committed; }
  double& trial_at(int elem, int q) { return trial[std::size_t(elem) * kQuadPerElem + q]; }
  double committed_at(int elem, int q) const {
    return committed[std::size_t(elem) * kQuadPerElem + q];
  }
};

struct SystemState {
  std::vector<double> u;    // 3 per node (mm)
  std::vector<double> phi;  // 1 per node (MPa)
  QuadHistory history;
  int step = 0;
  double load_factor = 0.0;

  static SystemState zero(const Mesh& m) {
    SystemState s;
    s.u.assign(std::size_t(m.node_count()) * 3, 0.0);
    s.phi.assign(m.node_count(), 0.0);
    s.history.resize(m.element_count());
    return s;
  }
};

// ---- problem definition ----

enum class Scheme { monolithic, staggered, local_only };
enum class Continuation { load_stepping, arc_length };

Scheme scheme_from_string(const std::string& s);
std::string to_string(Scheme s);

struct DirichletBC {
  std::string node_set;
  int dof = 0;        // 0..2 displacement component, 3 phi
  double value = 0.0; // target; ramped entries scale with the load factor
  bool ramped = false;
};

struct TractionBC {
  std::string node_set;  // applied over element faces contained in the set
  Vec3d traction;        // reference traction (MPa), scaled by the load factor
};

struct Problem {
  Mesh mesh;
  MaterialModel material;
  std::vector<DirichletBC> dirichlet;
  std::vector<TractionBC> tractions;
  // Optional multiplicative field on kappa_d (smooth imperfections for
  // localization studies); evaluated at quadrature points.
  std::function<double(const Vec3d&)> kappa_d_scale;
};

struct SolverConfig {
  Scheme scheme = Scheme::monolithic;
  Continuation continuation = Continuation::load_stepping;
  int steps = 100;
  double newton_tol = 1e-8;  // relative residual
  double newton_abs_tol = 1e-12;
  int newton_max_iter = 25;
  double local_tol = 1e-10;
  int local_max_iter = 100;
  double d_max = 0.995;  // early termination threshold
  int max_halvings = 8;
  double arc_radius = -1.0;   // -1: derived from the first increment; must be > 0 otherwise
  double arc_psi = 1.0;       // load-term scaling in the arc constraint
  bool record_states = false;
  int threads = 1;
};

// ---- per-step output ----

struct HistoryRow {
  int step = 0;
  double load_factor = 0.0;
  double prescribed_displacement = 0.0;  // mm
  double reaction_force = 0.0;           // MPa mm^2
  double max_s11 = 0.0;                  // MPa (Cauchy)
  double max_kappa = 0.0;                // MPa
  double max_d = 0.0;
  double max_phi = 0.0;
};

enum class RunTermination { completed, damage_threshold, step_underflow, diverged };

struct Trajectory {
  std::vector<HistoryRow> rows;
  std::vector<SystemState> states;  // filled when record_states is on
  SystemState final_state;
  RunTermination termination = RunTermination::completed;
  std::string message;
};

// Per-element mean damage of a state (VTK cell data / localization metrics).
std::vector<double> element_damage(const Problem& p, const SystemState& s);
std::vector<double> element_kappa(const Problem& p, const SystemState& s);

}  // namespace gedfem
