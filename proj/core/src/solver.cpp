#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <limits>

#include "gedfem/solver.hpp"

namespace gedfem {

namespace {

double norm2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

bool has_nan(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return true;
  return false;
}

void apply_prescribed(const ConstraintSet& bc, double gamma, const DofMap& dofs,
                      SystemState& state) {
  for (int i = 0; i < dofs.dof_count(); ++i) {
    if (!bc.constrained[i]) continue;
    const double v = bc.fixed[i] + gamma * bc.ramp[i];
    const int node = i / kDofsPerNode;
    const int comp = i % kDofsPerNode;
    if (comp < 3)
      state.u[std::size_t(node) * 3 + comp] = v;
    else
      state.phi[node] = v;
  }
}

void restrict_to_free(const ConstraintSet& bc, std::vector<double>& r) {
  for (std::size_t i = 0; i < r.size(); ++i)
    if (bc.constrained[i]) r[i] = 0.0;
}

// Rows/cols of constrained dofs dropped, unit diagonal inserted.
std::vector<Triplet> condense(const ConstraintSet& bc, const std::vector<Triplet>& t, int n) {
  std::vector<Triplet> out;
  out.reserve(t.size() + n);
  for (const Triplet& e : t)
    if (!bc.constrained[e.row] && !bc.constrained[e.col]) out.push_back(e);
  for (int i = 0; i < n; ++i)
    if (bc.constrained[i]) out.push_back({i, i, 1.0});
  return out;
}

void add_to_state(const DofMap& dofs, const ConstraintSet& bc, const std::vector<double>& dx,
                  SystemState& state) {
  for (int i = 0; i < dofs.dof_count(); ++i) {
    if (bc.constrained[i] || dx[i] == 0.0) continue;
    const int node = i / kDofsPerNode;
    const int comp = i % kDofsPerNode;
    if (comp < 3)
      state.u[std::size_t(node) * 3 + comp] += dx[i];
    else
      state.phi[node] += dx[i];
  }
}

}  // namespace

NewtonReport newton_solve(const Problem& p, const DofMap& dofs, const ConstraintSet& bc,
                          const std::vector<double>& f_ref, SystemState& state, double gamma,
                          const SolverConfig& cfg) {
  NewtonReport rep;
  apply_prescribed(bc, gamma, dofs, state);

  double r0 = -1.0;
  for (int it = 0; it <= cfg.newton_max_iter; ++it) {
    // residual-only pass for the convergence check; the tangent is assembled
    // only when another correction is actually needed
    AssemblyOutput sys;
    try {
      sys = assemble(p, dofs, state, gamma, f_ref, cfg.scheme, cfg, false);
    } catch (const std::exception& e) {
      rep.reason = std::string("assembly failed: ") + e.what();
      return rep;
    }
    if (!sys.ok) {
      rep.reason = "element failure in " + std::to_string(sys.failed_elements.size()) +
                   " element(s), first id " + std::to_string(sys.failed_elements.front()) +
                   ": " + sys.first_error;
      return rep;
    }
    if (has_nan(sys.residual)) {
      rep.reason = "non-finite residual";
      return rep;
    }
    restrict_to_free(bc, sys.residual);
    const double rnorm = norm2(sys.residual);
    rep.residual_norms.push_back(rnorm);
    if (it == 0) r0 = rnorm;
    if (rnorm <= std::max(cfg.newton_tol * r0, cfg.newton_abs_tol)) {
      rep.converged = true;
      rep.iterations = it;
      return rep;
    }
    if (it == cfg.newton_max_iter) break;

    AssemblyOutput tan;
    try {
      tan = assemble(p, dofs, state, gamma, f_ref, cfg.scheme, cfg, true);
    } catch (const std::exception& e) {
      rep.reason = std::string("assembly failed: ") + e.what();
      return rep;
    }
    if (!tan.ok) {
      rep.reason = "element failure during tangent assembly";
      return rep;
    }
    std::vector<double> rhs(sys.residual.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -sys.residual[i];
    std::vector<double> dx;
    try {
      dx = sparse_lu_solve(dofs.dof_count(), condense(bc, tan.tangent, dofs.dof_count()), rhs);
    } catch (const SolverError& e) {
      rep.reason = e.what();
      return rep;
    }
    if (has_nan(dx)) {
      rep.reason = "non-finite correction";
      return rep;
    }
    rep.correction_norms.push_back(norm2(dx));
    add_to_state(dofs, bc, dx, state);
    rep.iterations = it + 1;
  }
  rep.reason =
      "newton did not converge in " + std::to_string(cfg.newton_max_iter) + " iterations";
  return rep;
}

namespace {

struct StepContext {
  DofMap dofs;
  ConstraintSet bc;
  std::vector<double> f_ref;

  static StepContext build(const Problem& p, const SolverConfig& cfg) {
    StepContext ctx{DofMap::for_mesh(p.mesh), {}, {}};
    ctx.bc = resolve_constraints(p, ctx.dofs, cfg.scheme);
    ctx.f_ref = reference_external_force(p, ctx.dofs);
    return ctx;
  }
};

// Field solve + one history sweep. For staggered/local schemes the sweep is
// the kappa update; for monolithic it re-derives the same values the kernel
// used, materializing them in the trial slots for the commit.
bool solve_increment(const Problem& p, const StepContext& ctx, SystemState& state, double gamma,
                     const SolverConfig& cfg, std::string* why = nullptr) {
  NewtonReport rep = newton_solve(p, ctx.dofs, ctx.bc, ctx.f_ref, state, gamma, cfg);
  if (!rep.converged) {
    if (why) *why = rep.reason;
    return false;
  }
  if (!sweep_history(p, state, cfg)) {
    if (why) *why = "history sweep failed";
    return false;
  }
  return true;
}

// Measure + commit. Returns false when d_max terminates the run.
bool commit_step(const Problem& pr, const SolverConfig& cfg, const StepContext& ctx,
                 SystemState& state, double gamma, int step, Trajectory& traj,
                 const StepCallback& on_commit) {
  const HistoryRow row = measure_state(pr, state, ctx.bc, ctx.f_ref, gamma, step, cfg);
  state.history.commit();
  state.step = step;
  state.load_factor = gamma;
  traj.rows.push_back(row);
  if (cfg.record_states) traj.states.push_back(state);
  if (on_commit) on_commit(step, state, row);
  return row.max_d < cfg.d_max;
}

}  // namespace

Trajectory load_stepping(const Problem& p, const SolverConfig& cfg,
                         const StepCallback& on_commit) {
  Trajectory traj;
  const StepContext ctx = StepContext::build(p, cfg);

  SystemState state = SystemState::zero(p.mesh);
  double gamma = 0.0;
  double dgamma = 1.0 / cfg.steps;
  int step = 0;
  const double min_increment = std::pow(0.5, cfg.max_halvings + 2) / cfg.steps;
  const int max_total_steps = 64 * cfg.steps;

  while (gamma < 1.0 - 1e-12 && step < max_total_steps) {
    double attempt = std::min(dgamma, 1.0 - gamma);
    SystemState backup = state;
    bool accepted = false;
    std::string why;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
      if (solve_increment(p, ctx, state, gamma + attempt, cfg, &why)) {
        accepted = true;
        break;
      }
      state = backup;  // rolls the trial history back as well
      attempt *= 0.5;
    }
    if (!accepted) {
      traj.termination = RunTermination::step_underflow;
      traj.message = "increment underflow at load factor " + std::to_string(gamma) + ": " + why;
      break;
    }
    gamma += attempt;
    // recover toward the nominal increment after transient halvings
    dgamma = std::min(2.0 * attempt, 1.0 / cfg.steps);
    ++step;
    if (!commit_step(p, cfg, ctx, state, gamma, step, traj, on_commit)) {
      traj.termination = RunTermination::damage_threshold;
      traj.message = "damage threshold reached";
      break;
    }
    if (attempt < min_increment) {
      traj.termination = RunTermination::step_underflow;
      traj.message = "increment underflow at load factor " + std::to_string(gamma);
      break;
    }
  }
  if (traj.termination == RunTermination::completed && gamma < 1.0 - 1e-12) {
    traj.termination = RunTermination::step_underflow;
    traj.message = "step budget exhausted at load factor " + std::to_string(gamma);
  }
  traj.final_state = state;
  return traj;
}

namespace {

// Tangent load direction t = f_ref - K * ramp (ramp supported on constrained dofs).
std::vector<double> tangent_load(const StepContext& ctx, const std::vector<Triplet>& k_full,
                                 int n) {
  std::vector<double> t(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (!ctx.bc.constrained[i] && !ctx.f_ref.empty()) t[i] = ctx.f_ref[i];
  for (const Triplet& e : k_full) {
    if (ctx.bc.constrained[e.row] || !ctx.bc.constrained[e.col]) continue;
    const double r = ctx.bc.ramp[e.col];
    if (r != 0.0) t[e.row] -= e.value * r;
  }
  return t;
}

double free_dot(const ConstraintSet& bc, const std::vector<double>& a,
                const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!bc.constrained[i]) acc += a[i] * b[i];
  return acc;
}

struct ArcStepResult {
  bool converged = false;
  double delta_gamma = 0.0;
};

// One arc-length step with a spherical (Crisfield) constraint on
// (delta_x_free, psi * delta_gamma * load_scale).
ArcStepResult arc_step(const Problem& p, const StepContext& ctx, SystemState& state,
                       double gamma, double radius, double psi2b,
                       const std::vector<double>& prev_dx, double prev_dgamma,
                       const SolverConfig& cfg) {
  const int n = ctx.dofs.dof_count();
  std::vector<double> delta_x(n, 0.0);
  double delta_gamma = 0.0;
  double r_ref = -1.0;
  double last_correction = std::numeric_limits<double>::infinity();
  ArcStepResult out;

  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    AssemblyOutput sys;
    try {
      sys = assemble(p, ctx.dofs, state, gamma + delta_gamma, ctx.f_ref, cfg.scheme, cfg, false);
    } catch (const std::exception& e) {
      if (std::getenv("GEDFEM_ARC_DEBUG"))
        std::fprintf(stderr, "  arc it %d: assembly threw: %s\n", it, e.what());
      return out;
    }
    if (!sys.ok || has_nan(sys.residual)) {
      if (std::getenv("GEDFEM_ARC_DEBUG"))
        std::fprintf(stderr, "  arc it %d: element failure: %s\n", it,
                     sys.first_error.c_str());
      return out;
    }
    std::vector<double> r = sys.residual;
    restrict_to_free(ctx.bc, r);
    const double rnorm = norm2(r);
    if (it > 0) {
      if (r_ref < 0.0) r_ref = std::max(rnorm, cfg.newton_abs_tol);
      const double arc_c = free_dot(ctx.bc, delta_x, delta_x) +
                           psi2b * delta_gamma * delta_gamma - radius * radius;
      // force criterion, with a displacement-based fallback: the local return
      // maps leave a round-off floor in the residual that a well-predicted
      // step cannot undercut relative to its own small r_ref
      const double dx_norm = std::sqrt(free_dot(ctx.bc, delta_x, delta_x));
      const bool force_ok = rnorm <= std::max(cfg.newton_tol * r_ref, cfg.newton_abs_tol);
      const bool disp_ok = last_correction <= 1e-8 * std::max(dx_norm, 1e-12) &&
                           rnorm <= 1e-4 * r_ref;
      if (std::getenv("GEDFEM_ARC_DEBUG"))
        std::fprintf(stderr, "  arc it %d: r=%.3e rref=%.3e dx=%.3e corr=%.3e c=%.3e dg=%.4f\n",
                     it, rnorm, r_ref, dx_norm, last_correction, arc_c, delta_gamma);
      if ((force_ok || disp_ok) && std::abs(arc_c) <= 1e-8 * radius * radius) {
        out.converged = true;
        out.delta_gamma = delta_gamma;
        return out;
      }
    }

    AssemblyOutput tan;
    try {
      tan = assemble(p, ctx.dofs, state, gamma + delta_gamma, ctx.f_ref, cfg.scheme, cfg, true);
    } catch (const std::exception&) {
      return out;
    }
    if (!tan.ok) return out;
    const std::vector<double> t = tangent_load(ctx, tan.tangent, n);
    const std::vector<Triplet> k_c = condense(ctx.bc, tan.tangent, n);
    std::vector<double> rhs_r(n), rhs_t(n);
    for (int i = 0; i < n; ++i) {
      rhs_r[i] = ctx.bc.constrained[i] ? 0.0 : -r[i];
      rhs_t[i] = ctx.bc.constrained[i] ? 0.0 : t[i];
    }
    std::vector<double> dxr, dxt;
    try {
      dxr = sparse_lu_solve(n, k_c, rhs_r);
      dxt = sparse_lu_solve(n, k_c, rhs_t);
    } catch (const SolverError&) {
      return out;
    }
    if (has_nan(dxr) || has_nan(dxt)) return out;

    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = delta_x[i] + dxr[i];
    const double a_q = free_dot(ctx.bc, dxt, dxt) + psi2b;
    const double b_q = 2.0 * (free_dot(ctx.bc, v, dxt) + psi2b * delta_gamma);
    const double c_q =
        free_dot(ctx.bc, v, v) + psi2b * delta_gamma * delta_gamma - radius * radius;
    const double disc = b_q * b_q - 4.0 * a_q * c_q;
    if (!(disc >= 0.0) || !(a_q > 0.0)) return out;  // constraint-root failure
    const double sq = std::sqrt(disc);
    const double dg1 = (-b_q + sq) / (2.0 * a_q);
    const double dg2 = (-b_q - sq) / (2.0 * a_q);
    // Root selection follows the displacement history: on dissipative paths
    // the load-factor term would otherwise pull the continuation onto the
    // elastic unloading branch at a freshly committed plastic state. The
    // load term only breaks ties when the displacement increment is empty.
    const double prev_dx_norm = std::sqrt(free_dot(ctx.bc, prev_dx, prev_dx));
    auto alignment = [&](double dg) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        if (!ctx.bc.constrained[i]) acc += (v[i] + dg * dxt[i]) * prev_dx[i];
      if (prev_dx_norm < 1e-14) acc += psi2b * (delta_gamma + dg) * prev_dgamma;
      return acc;
    };
    const double dg = alignment(dg1) >= alignment(dg2) ? dg1 : dg2;

    std::vector<double> upd(n, 0.0);
    for (int i = 0; i < n; ++i)
      if (!ctx.bc.constrained[i]) upd[i] = dxr[i] + dg * dxt[i];
    last_correction = norm2(upd);
    delta_gamma += dg;
    for (int i = 0; i < n; ++i) delta_x[i] += upd[i];
    add_to_state(ctx.dofs, ctx.bc, upd, state);
    apply_prescribed(ctx.bc, gamma + delta_gamma, ctx.dofs, state);
    if (has_nan(state.u) || has_nan(state.phi)) return out;
  }
  return out;
}

}  // namespace

Trajectory arc_length_stepping(const Problem& p, const SolverConfig& cfg,
                               const StepCallback& on_commit) {
  Trajectory traj;
  const StepContext ctx = StepContext::build(p, cfg);
  const int n = ctx.dofs.dof_count();

  if (cfg.arc_radius == 0.0) throw SolverError("arc length: zero arc radius");

  double b_load = 0.0;
  for (int dof : ctx.bc.ramped_dofs) b_load += ctx.bc.ramp[dof] * ctx.bc.ramp[dof];
  for (int i = 0; i < n; ++i)
    if (!ctx.bc.constrained[i]) b_load += ctx.f_ref[i] * ctx.f_ref[i];
  if (b_load <= 0.0) throw SolverError("arc length: no scalar load parameter in the problem");
  const double psi2b = cfg.arc_psi * cfg.arc_psi * b_load;

  SystemState state = SystemState::zero(p.mesh);
  double gamma = 0.0;
  int step = 0;

  // Seed radius and direction with one conventional increment.
  const double gamma0 = 1.0 / cfg.steps;
  {
    std::string why;
    if (!solve_increment(p, ctx, state, gamma0, cfg, &why)) {
      traj.termination = RunTermination::diverged;
      traj.message = "arc length: seeding increment failed: " + why;
      traj.final_state = state;
      return traj;
    }
    gamma = gamma0;
    ++step;
    if (!commit_step(p, cfg, ctx, state, gamma, step, traj, on_commit)) {
      traj.termination = RunTermination::damage_threshold;
      traj.final_state = state;
      return traj;
    }
  }

  std::vector<double> prev_dx(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (!ctx.bc.constrained[i]) {
      const int node = i / kDofsPerNode, comp = i % kDofsPerNode;
      prev_dx[i] = comp < 3 ? state.u[std::size_t(node) * 3 + comp] : state.phi[node];
    }
  double prev_dgamma = gamma0;
  double radius = cfg.arc_radius > 0.0
                      ? cfg.arc_radius
                      : std::sqrt(free_dot(ctx.bc, prev_dx, prev_dx) + psi2b * gamma0 * gamma0);
  if (!(radius > 0.0)) throw SolverError("arc length: derived arc radius is zero");
  const double radius_max = 8.0 * radius;

  const int max_total_steps = 64 * cfg.steps;
  while (gamma < 1.0 - 1e-10 && step < max_total_steps &&
         traj.termination == RunTermination::completed) {
    SystemState backup = state;
    const double gamma_backup = gamma;
    bool accepted = false;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
      const ArcStepResult r =
          arc_step(p, ctx, state, gamma, radius, psi2b, prev_dx, prev_dgamma, cfg);
      if (r.converged && sweep_history(p, state, cfg)) {
        // no-retracing rule: a converged step that reduces the load without
        // advancing any history variable is the elastic unloading branch,
        // not the continuation of the dissipative path
        double growth = 0.0;
        for (std::size_t i = 0; i < state.history.trial.size(); ++i)
          growth = std::max(growth, state.history.trial[i] - state.history.committed[i]);
        const bool retraced = r.delta_gamma < 0.0 && growth <= 1e-12;
        if (!retraced) {
          gamma += r.delta_gamma;
          accepted = true;
          break;
        }
      }
      state = backup;
      radius *= 0.5;
      if (!(radius > 1e-14)) break;
    }
    if (!accepted) {
      traj.termination = RunTermination::step_underflow;
      traj.message = "arc length: radius underflow at load factor " + std::to_string(gamma);
      break;
    }

    ++step;
    if (!commit_step(p, cfg, ctx, state, gamma, step, traj, on_commit)) {
      traj.termination = RunTermination::damage_threshold;
      break;
    }
    for (int i = 0; i < n; ++i)
      if (!ctx.bc.constrained[i]) {
        const int node = i / kDofsPerNode, comp = i % kDofsPerNode;
        const double cur = comp < 3 ? state.u[std::size_t(node) * 3 + comp] : state.phi[node];
        const double old = comp < 3 ? backup.u[std::size_t(node) * 3 + comp] : backup.phi[node];
        prev_dx[i] = cur - old;
      }
    prev_dgamma = gamma - gamma_backup;
    radius = std::min(radius * 1.2, radius_max);

    if (gamma > 1.0) {
      // Land exactly on the target load factor.
      SystemState clamp_backup = state;
      if (solve_increment(p, ctx, state, 1.0, cfg)) {
        gamma = 1.0;
        ++step;
        commit_step(p, cfg, ctx, state, gamma, step, traj, on_commit);
      } else {
        state = clamp_backup;
      }
      break;
    }
  }
  if (traj.termination == RunTermination::completed && gamma < 1.0 - 1e-10) {
    traj.termination = RunTermination::diverged;
    traj.message = "arc length: step budget exhausted";
  }
  traj.final_state = state;
  return traj;
}

Trajectory run_solver(const Problem& p, const SolverConfig& cfg, const StepCallback& on_commit) {
  p.mesh.validate();
  if (cfg.continuation == Continuation::arc_length) return arc_length_stepping(p, cfg, on_commit);
  return load_stepping(p, cfg, on_commit);
}

}  // namespace gedfem
