#pragma once

#include "gedfem/fem.hpp"
#include "gedfem/linear_solver.hpp"

namespace gedfem {

// Resolved boundary conditions at unit load factor. Prescribed values are
// fixed + gamma * ramp; the local-only scheme additionally pins all phi dofs.
struct ConstraintSet {
  std::vector<uint8_t> constrained;  // per dof
  std::vector<double> fixed;         // gamma-independent part
  std::vector<double> ramp;          // d(prescribed)/d(gamma)
  std::vector<int> ramped_dofs;
  double ramp_magnitude = 0.0;  // max |ramp| over ramped dofs (prescribed displacement scale)
};

ConstraintSet resolve_constraints(const Problem& p, const DofMap& dofs, Scheme scheme);

// Consistent nodal loads of the traction BCs at unit load factor.
std::vector<double> reference_external_force(const Problem& p, const DofMap& dofs);

struct AssemblyOutput {
  std::vector<double> residual;   // internal - gamma * external, full dof vector
  std::vector<Triplet> tangent;   // unconstrained triplets (only when requested)
  std::vector<int> failed_elements;
  std::string first_error;
  bool ok = true;
};

// Global scatter-add of element kernels. Element evaluations are independent
// and run on cfg.threads workers; the scatter is done serially in element
// order so results are bit-stable across thread counts.
AssemblyOutput assemble(const Problem& p, const DofMap& dofs, const SystemState& state,
                        double gamma, const std::vector<double>& f_ref, Scheme scheme,
                        const SolverConfig& cfg, bool with_tangent);

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_norms;
  std::vector<double> correction_norms;
  std::string reason;
};

// Full Newton solve of the (u, phi) fields at fixed load factor gamma.
// Prescribed dofs are set from the constraint set before iterating; kappa
// treatment follows cfg.scheme (monolithic resolves it inside the kernel,
// staggered keeps the last sweep values frozen).
NewtonReport newton_solve(const Problem& p, const DofMap& dofs, const ConstraintSet& bc,
                          const std::vector<double>& f_ref, SystemState& state, double gamma,
                          const SolverConfig& cfg);

// One staggered sweep: return map at every quadrature point from the
// committed history, results into the trial slots.
bool sweep_history(const Problem& p, SystemState& state, const SolverConfig& cfg);

HistoryRow measure_state(const Problem& p, const SystemState& state, const ConstraintSet& bc,
                         const std::vector<double>& f_ref, double gamma, int step,
                         const SolverConfig& cfg);

using StepCallback = std::function<void(int step, const SystemState&, const HistoryRow&)>;

Trajectory load_stepping(const Problem& p, const SolverConfig& cfg,
                         const StepCallback& on_commit = {});

Trajectory arc_length_stepping(const Problem& p, const SolverConfig& cfg,
                               const StepCallback& on_commit = {});

Trajectory run_solver(const Problem& p, const SolverConfig& cfg,
                      const StepCallback& on_commit = {});

}  // namespace gedfem
