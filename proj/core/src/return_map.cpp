#include "gedfem/return_map.hpp"

#include <cmath>
#include <limits>

namespace gedfem {

namespace {

using D1 = Dual<double, 1>;

struct PhiEvaluator {
  const Tensor2d& f;
  double phi;
  const Vec3d& grad_phi;
  const MaterialModel& m;
  Coupling coupling;

  Tensor2<D1> fd;
  Vec3<D1> gpd;

  PhiEvaluator(const Tensor2d& f_, double phi_, const Vec3d& gp_, const MaterialModel& m_,
               Coupling c_)
      : f(f_), phi(phi_), grad_phi(gp_), m(m_), coupling(c_) {
    for (int i = 0; i < 9; ++i) fd.e[i] = D1(f.e[i]);
    for (int i = 0; i < 3; ++i) gpd[i] = D1(grad_phi[i]);
  }

  // Past the degradation floor the penalty part of q blows up with the sign
  // of (phi - kappa); substitute a signed sentinel so bracketing still works.
  double value(double kappa) const {
    try {
      return yield_function(f, phi, grad_phi, kappa, m, coupling);
    } catch (const ConstitutiveError&) {
      return phi >= kappa ? 1e300 : -1e300;
    }
  }

  // (Phi, dPhi/dkappa); falls back to the sentinel pair on evaluation failure.
  std::pair<double, double> value_and_slope(double kappa) const {
    try {
      const D1 y = yield_function(fd, D1(phi), gpd, D1::seeded(kappa, 0), m, coupling);
      return {y.value, y.tang[0]};
    } catch (const ConstitutiveError&) {
      return {phi >= kappa ? 1e300 : -1e300, 0.0};
    }
  }
};

double yield_slope_wrt_q(const MaterialModel& m, const Tensor2d& f, double phi,
                         const Vec3d& grad_phi, double kappa, Coupling coupling) {
  if (m.is_closed_form()) return 1.0;
  const double q = driving_force(f, phi, grad_phi, kappa, m, coupling);
  const D1 n = monotone_eval(m.data_driven().yield_net, D1::seeded(q, 0));
  return n.tang[0];
}

}  // namespace

double yield_kappa_derivative(const Tensor2d& f, double phi, const Vec3d& grad_phi, double kappa,
                              const MaterialModel& m, Coupling coupling) {
  PhiEvaluator ev(f, phi, grad_phi, m, coupling);
  return ev.value_and_slope(kappa).second;
}

ReturnMapResult return_map(const Tensor2d& f, double phi, const Vec3d& grad_phi, double kappa_n,
                           const MaterialModel& m, Coupling coupling,
                           const ReturnMapControls& ctl) {
  PhiEvaluator ev(f, phi, grad_phi, m, coupling);
  ReturnMapResult res;
  res.kappa_next = kappa_n;

  const double phi_trial = ev.value(kappa_n);
  if (std::isnan(phi_trial)) {
    res.status = ReturnMapStatus::not_finite;
    return res;
  }
  // Phi is evaluated with cancellation between terms of magnitude up to
  // psi_e + (gamma beta / eta f_d) (|phi| + |kappa|); its round-off noise can
  // exceed any fixed absolute tolerance once the penalty amplification is
  // large, so the effective tolerance carries a floor relative to that scale.
  double term_scale = 1.0 + std::abs(kappa_n);
  try {
    term_scale += std::abs(value_of(elastic_energy(right_cauchy_green(f), m)));
    if (coupling == Coupling::nonlocal && m.beta_d() != 0.0) {
      const double fd = degradation_factor(kappa_n, m.eta_d(), m.kappa_d());
      const double amp = m.gamma_d() * m.beta_d() / (m.eta_d() * std::max(fd, 1e-8));
      term_scale += amp * (std::abs(phi) + std::abs(kappa_n));
    }
  } catch (const std::exception&) {
    // fall back to the trial magnitude if the state is already degenerate
    term_scale += std::abs(phi_trial);
  }
  const double tol_eff = std::max(ctl.tol_local, 32.0 * 2.22e-16 * term_scale);
  if (phi_trial <= tol_eff) {
    res.converged = true;
    res.status = ReturnMapStatus::elastic;
    res.phi_d_residual = phi_trial;
    return res;
  }

  // Grow a bracket [lo, hi] with Phi(lo) > 0 >= Phi(hi).
  double lo = kappa_n;
  double phi_lo = phi_trial;
  const double scale = std::max({1.0, kappa_n, std::abs(phi_trial)});
  double step = 1e-6 * scale;
  double hi = lo;
  double phi_hi = phi_lo;
  bool bracketed = false;
  for (int k = 0; k < 60; ++k) {
    hi = kappa_n + step;
    phi_hi = ev.value(hi);
    if (std::isnan(phi_hi)) {
      res.status = ReturnMapStatus::not_finite;
      return res;
    }
    if (phi_hi <= 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
    phi_lo = phi_hi;
    step *= 2.0;
  }
  if (!bracketed) {
    res.status = ReturnMapStatus::no_bracket;
    res.kappa_next = hi;
    res.phi_d_residual = phi_hi;
    return res;
  }

  // Safeguarded Newton started at the lower bracket end; the start at kappa_n
  // makes a single iteration exact for the local closed-form limit.
  double x = (lo == kappa_n) ? kappa_n : lo;
  double phi_x = (x == kappa_n) ? phi_trial : phi_lo;
  for (int it = 0; it < ctl.max_iter; ++it) {
    res.iterations = it + 1;
    const auto [val, slope] = ev.value_and_slope(x);
    phi_x = val;
    if (std::isnan(val) || std::isnan(slope)) {
      res.status = ReturnMapStatus::not_finite;
      res.kappa_next = x;
      return res;
    }
    if (std::abs(val) <= tol_eff) {
      // One polishing step so the complementarity product stays at the
      // tolerance even for large multipliers.
      double best_x = x, best_val = val;
      if (slope != 0.0) {
        const double xp = x - val / slope;
        if (xp >= kappa_n) {
          const double vp = ev.value(xp);
          if (std::isfinite(vp) && std::abs(vp) < std::abs(val)) {
            best_x = xp;
            best_val = vp;
          }
        }
      }
      res.kappa_next = std::max(best_x, kappa_n);
      res.phi_d_residual = best_val;
      res.converged = true;
      res.status = ReturnMapStatus::converged;
      break;
    }
    if (val > 0.0) {
      lo = x;
      phi_lo = val;
    } else {
      hi = x;
      phi_hi = val;
    }
    double x_new;
    if (slope != 0.0) {
      x_new = x - val / slope;
      if (!(x_new > lo && x_new < hi)) x_new = 0.5 * (lo + hi);
    } else {
      x_new = 0.5 * (lo + hi);
    }
    if (x_new == x || hi - lo <= 4e-16 * std::max(1.0, std::abs(hi))) {
      // Bracket collapsed to machine width; accept the better endpoint.
      x = std::abs(phi_lo) < std::abs(phi_hi) ? lo : hi;
      const double v = ev.value(x);
      res.kappa_next = std::max(x, kappa_n);
      res.phi_d_residual = v;
      res.converged = std::abs(v) <= tol_eff;
      res.status = res.converged ? ReturnMapStatus::converged : ReturnMapStatus::max_iterations;
      break;
    }
    x = x_new;
  }
  if (!res.converged && res.status == ReturnMapStatus::elastic) {
    // loop ran out of iterations without hitting a terminal branch
    res.status = ReturnMapStatus::max_iterations;
    res.kappa_next = std::max(x, kappa_n);
    res.phi_d_residual = phi_x;
  }
  if (!res.converged) return res;

  const double dg_dq =
      yield_slope_wrt_q(m, f, phi, grad_phi, res.kappa_next, coupling);
  const double dkappa = res.kappa_next - kappa_n;
  if (dg_dq > 1e-12) {
    res.delta_lambda = dkappa / dg_dq;
  } else {
    res.degenerate = true;
    res.delta_lambda = dkappa;
  }
  return res;
}

}  // namespace gedfem
