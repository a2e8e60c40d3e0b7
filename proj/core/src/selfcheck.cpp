#include "gedfem/selfcheck.hpp"

#include <cmath>
#include <ostream>

#include "gedfem/return_map.hpp"

namespace gedfem {

RandomState random_admissible_state(std::mt19937& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RandomState s;
  for (;;) {
    s.f = Tensor2d::identity();
    for (int i = 0; i < 9; ++i) s.f.e[i] += scale * u(rng);
    if (determinant(s.f) > 0.2) break;
  }
  s.kappa = 0.3 * (u(rng) + 1.0);           // [0, 0.6]
  s.phi = s.kappa + 0.02 * u(rng);          // near the penalty equilibrium
  for (int i = 0; i < 3; ++i) s.grad_phi[i] = 0.1 * u(rng);
  return s;
}

IcnnWeights random_icnn(std::mt19937& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  IcnnWeights w;
  for (int i = 0; i < kNetHiddenWidth; ++i) {
    for (int j = 0; j < 2; ++j) {
      w.wx1[i][j] = g(rng) * 0.5;
      w.wx2[i][j] = g(rng) * 0.5;
    }
    w.b1[i] = g(rng);
    w.b2[i] = g(rng);
    for (int j = 0; j < kNetHiddenWidth; ++j) {
      const double v = g(rng);
      w.wz1[i][j] = v * v;  // non-negative passthrough
    }
    const double v2 = g(rng);
    w.wz2[i] = v2 * v2;
  }
  w.wx3[0] = 0.3 + 0.1 * g(rng);
  w.wx3[1] = 0.1 * g(rng);
  w.b3 = g(rng);
  w.validate();
  return w;
}

MonotoneNetWeights random_monotone(std::mt19937& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  MonotoneNetWeights w;
  for (int i = 0; i < kNetHiddenWidth; ++i) {
    const double v1 = g(rng);
    w.w1[i] = v1 * v1;
    w.b1[i] = g(rng);
    w.b2[i] = g(rng);
    for (int j = 0; j < kNetHiddenWidth; ++j) {
      const double v = g(rng);
      w.w2[i][j] = 0.25 * v * v;
    }
    const double v3 = g(rng);
    w.w3[i] = 0.25 * v3 * v3;
  }
  const double va = g(rng);
  w.a0 = 0.5 + 0.25 * va * va;
  w.b0 = g(rng);
  w.validate();
  return w;
}

ClosedFormParams random_closed_form(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ClosedFormParams p;
  p.mu_e = 0.5 + 2.0 * u(rng);
  p.lambda_e = 0.5 + 2.0 * u(rng);
  p.eta_d = 0.5 + 4.0 * u(rng);
  p.kappa_d = 0.2 * u(rng);
  p.c_d = u(rng);
  p.beta_d = 5.0 * u(rng);
  p.gamma_d = 1.0;
  return p;
}

DataDrivenParams random_data_driven(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DataDrivenParams p;
  p.mu_e = 0.5 + 2.0 * u(rng);
  p.lambda_e = 0.5 + 2.0 * u(rng);
  p.eta_d = 0.5 + 4.0 * u(rng);
  p.kappa_d = 0.2 * u(rng);
  p.c_d = u(rng);
  p.beta_d = 5.0 * u(rng);
  p.gamma_d = 1.0;
  p.psi_iso_net = random_icnn(rng);
  p.yield_net = random_monotone(rng);
  return p;
}

namespace {

double rel_err(double got, double want, double floor_scale) {
  return std::abs(got - want) / std::max(std::abs(want), floor_scale);
}

// Central finite differences of the free energy with respect to F, grad phi, phi.
struct FdConjugates {
  Tensor2d p;
  Vec3d y_vec;
  double y_scl;
};

FdConjugates fd_conjugates(const RandomState& s, const MaterialModel& m, double h) {
  FdConjugates out;
  for (int i = 0; i < 9; ++i) {
    Tensor2d fp = s.f, fm = s.f;
    fp.e[i] += h;
    fm.e[i] -= h;
    out.p.e[i] = (internal_energy(fp, s.phi, s.grad_phi, s.kappa, m) -
                  internal_energy(fm, s.phi, s.grad_phi, s.kappa, m)) /
                 (2.0 * h);
  }
  for (int k = 0; k < 3; ++k) {
    Vec3d gp = s.grad_phi, gm = s.grad_phi;
    gp[k] += h;
    gm[k] -= h;
    out.y_vec[k] = (internal_energy(s.f, s.phi, gp, s.kappa, m) -
                    internal_energy(s.f, s.phi, gm, s.kappa, m)) /
                   (2.0 * h);
  }
  out.y_scl = -(internal_energy(s.f, s.phi + h, s.grad_phi, s.kappa, m) -
                internal_energy(s.f, s.phi - h, s.grad_phi, s.kappa, m)) /
              (2.0 * h);
  return out;
}

CheckResult check_ad_vs_fd(const std::string& name, bool data_driven, unsigned seed) {
  std::mt19937 rng(seed);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const MaterialModel m = data_driven ? MaterialModel(random_data_driven(rng))
                                        : MaterialModel(random_closed_form(rng));
    const RandomState s = random_admissible_state(rng);
    const Tensor2d p_ad = pk1_stress(s.f, s.phi, s.grad_phi, s.kappa, m);
    const NonlocalConjugates c_ad = nonlocal_conjugates(s.f, s.phi, s.grad_phi, s.kappa, m);
    const FdConjugates fd = fd_conjugates(s, m, h);
    const double scale = std::max(1.0, value_of(elastic_energy(right_cauchy_green(s.f), m)));
    for (int i = 0; i < 9; ++i) worst = std::max(worst, rel_err(p_ad.e[i], fd.p.e[i], scale));
    for (int k = 0; k < 3; ++k)
      worst = std::max(worst, rel_err(c_ad.y_vec[k], fd.y_vec[k], scale));
    worst = std::max(worst, rel_err(c_ad.y_scl, fd.y_scl, scale));
  }
  CheckResult r;
  r.name = name;
  r.pass = worst < 1e-5;
  r.detail = "max relative error " + std::to_string(worst) + " (tol 1e-5)";
  return r;
}

CheckResult check_convexity(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(3.0, 20.0);
  int violations = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const IcnnWeights w = random_icnn(rng);
    for (int i = 0; i < 1000; ++i) {
      const double x0 = u(rng), x1 = u(rng), y0 = u(rng), y1 = u(rng);
      const double f_mid = icnn_eval(w, 0.5 * (x0 + y0), 0.5 * (x1 + y1));
      const double avg = 0.5 * (icnn_eval(w, x0, x1) + icnn_eval(w, y0, y1));
      const double gap = f_mid - avg;
      worst = std::max(worst, gap);
      if (gap > 1e-12) ++violations;
    }
  }
  CheckResult r;
  r.name = "icnn_midpoint_convexity";
  r.pass = violations == 0;
  r.detail = std::to_string(violations) + " violations over 10000 pairs (worst gap " +
             std::to_string(worst) + ")";
  return r;
}

CheckResult check_monotonicity(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-20.0, 100.0);
  int violations = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const MonotoneNetWeights w = random_monotone(rng);
    for (int i = 0; i < 1000; ++i) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      if (monotone_eval(w, b) - monotone_eval(w, a) < -1e-12) ++violations;
      const Dual<double, 1> dq = monotone_eval(w, Dual<double, 1>::seeded(u(rng), 0));
      if (dq.tang[0] < -1e-12) ++violations;
    }
  }
  CheckResult r;
  r.name = "yield_map_monotonicity";
  r.pass = violations == 0;
  r.detail = std::to_string(violations) + " violations over 10000 samples";
  return r;
}

CheckResult check_kkt(unsigned seed) {
  std::mt19937 rng(seed);
  int checked = 0, failed = 0;
  double worst_comp = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const bool dd = trial % 2 == 1;
    const MaterialModel m = dd ? MaterialModel(random_data_driven(rng))
                               : MaterialModel(random_closed_form(rng));
    const RandomState s = random_admissible_state(rng);
    ReturnMapResult rm;
    try {
      rm = return_map(s.f, s.phi, s.grad_phi, s.kappa, m);
    } catch (const std::exception&) {
      continue;
    }
    if (!rm.converged) continue;
    ++checked;
    const bool ok = rm.delta_lambda >= 0.0 && rm.phi_d_residual <= 1e-10 &&
                    std::abs(rm.delta_lambda * rm.phi_d_residual) <= 1e-10 &&
                    rm.kappa_next >= s.kappa;
    worst_comp = std::max(worst_comp, std::abs(rm.delta_lambda * rm.phi_d_residual));
    if (!ok) ++failed;
  }
  CheckResult r;
  r.name = "return_map_kkt";
  r.pass = failed == 0 && checked > 5000;
  r.detail = std::to_string(failed) + " KKT failures over " + std::to_string(checked) +
             " converged results (worst complementarity " + std::to_string(worst_comp) + ")";
  return r;
}

}  // namespace

std::vector<CheckResult> run_selfchecks(unsigned seed, std::ostream* log) {
  std::vector<CheckResult> results;
  results.push_back(check_ad_vs_fd("ad_vs_fd_closed_form", false, seed));
  results.push_back(check_ad_vs_fd("ad_vs_fd_data_driven", true, seed + 1));
  results.push_back(check_convexity(seed + 2));
  results.push_back(check_monotonicity(seed + 3));
  results.push_back(check_kkt(seed + 4));
  if (log) {
    for (const CheckResult& r : results)
      (*log) << (r.pass ? "PASS" : "FAIL") << "  " << r.name << ": " << r.detail << "\n";
  }
  return results;
}

}  // namespace gedfem
