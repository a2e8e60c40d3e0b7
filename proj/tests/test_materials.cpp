#include <doctest.h>

#include <cmath>
#include <random>

#include "gedfem/material.hpp"
#include "gedfem/selfcheck.hpp"

using namespace gedfem;

namespace {

Tensor2d rotation(const Vec3d& axis_raw, double angle) {
  const double n = std::sqrt(dot(axis_raw, axis_raw));
  const Vec3d k{axis_raw[0] / n, axis_raw[1] / n, axis_raw[2] / n};
  const double c = std::cos(angle), s = std::sin(angle);
  Tensor2d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (i == j ? c : 0.0) + (1.0 - c) * k[i] * k[j];
  r(0, 1) -= s * k[2];
  r(0, 2) += s * k[1];
  r(1, 0) += s * k[2];
  r(1, 2) -= s * k[0];
  r(2, 0) -= s * k[1];
  r(2, 1) += s * k[0];
  return r;
}

// analytic neo-Hookean PK1: mu (F - F^-T) + lambda ln J F^-T
Tensor2d analytic_nh_pk1(const Tensor2d& f, double mu, double lambda) {
  const Tensor2d f_inv_t = transpose(inverse(f));
  const double ln_j = std::log(determinant(f));
  Tensor2d p;
  for (int k = 0; k < 9; ++k) p.e[k] = mu * (f.e[k] - f_inv_t.e[k]) + lambda * ln_j * f_inv_t.e[k];
  return p;
}

}  // namespace

TEST_CASE("neo-Hookean energy values") {
  CHECK(neo_hookean_energy(Tensor2d::identity(), 1.0, 1.0) == 0.0);
  // (1/2)(6-3) - ln 2 + (1/2)(ln 2)^2
  const double expected = 1.5 - std::log(2.0) + 0.5 * std::log(2.0) * std::log(2.0);
  CHECK(expected == doctest::Approx(1.0470793263991554).epsilon(1e-15));
  CHECK(neo_hookean_energy(Tensor2d::diag(4.0, 1.0, 1.0), 1.0, 1.0) ==
        doctest::Approx(1.0470793263991554).epsilon(1e-14));
  CHECK_THROWS_AS(neo_hookean_energy(Tensor2d::diag(1.0, 1.0, -1.0), 1.0, 1.0),
                  ConstitutiveError);
}

TEST_CASE("stress-free reference state") {
  ClosedFormParams p;
  p.mu_e = 2.0;
  p.lambda_e = 3.0;
  const MaterialModel m(p);
  const Tensor2d pk1 = pk1_stress(Tensor2d::identity(), 0.0, Vec3d{}, 0.0, m);
  for (int k = 0; k < 9; ++k) CHECK(std::abs(pk1.e[k]) < 1e-14);
}

TEST_CASE("data-driven energy vanishes at the reference for any weights") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const DataDrivenParams p = random_data_driven(rng);
    CHECK(datadriven_energy(Tensor2d::identity(), p) == 0.0);
  }
}

TEST_CASE("stress normality holds identically for the data-driven model") {
  std::mt19937 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const MaterialModel m{random_data_driven(rng)};
    const Tensor2d pk1 = pk1_stress(Tensor2d::identity(), 0.0, Vec3d{}, 0.0, m);
    for (int k = 0; k < 9; ++k) CHECK(std::abs(pk1.e[k]) < 1e-10);
  }
}

TEST_CASE("data-driven energy is non-negative for non-decreasing isochoric nets") {
  // I1G, I2G >= 3 for any SPD C, so a convex non-decreasing normalized
  // psi_iso plus the normalized volumetric term gives psi >= 0.
  std::mt19937 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    DataDrivenParams p = random_data_driven(rng);
    for (int i = 0; i < kNetHiddenWidth; ++i)
      for (int j = 0; j < 2; ++j) {
        p.psi_iso_net.wx1[i][j] = std::abs(p.psi_iso_net.wx1[i][j]);
        p.psi_iso_net.wx2[i][j] = std::abs(p.psi_iso_net.wx2[i][j]);
      }
    p.psi_iso_net.wx3[0] = std::abs(p.psi_iso_net.wx3[0]);
    p.psi_iso_net.wx3[1] = std::abs(p.psi_iso_net.wx3[1]);
    const RandomState s = random_admissible_state(rng);
    const double psi = datadriven_energy(right_cauchy_green(s.f), p);
    CHECK(psi > -1e-10);
  }
}

TEST_CASE("degradation function") {
  SUBCASE("below threshold") {
    const LocalState s = degradation(0.0, 1.0, 0.1);
    CHECK(s.f_d == 1.0);
    CHECK(s.d == 0.0);
  }
  SUBCASE("unit exponent") {
    const double eta = 3.0, kd = 0.2;
    const LocalState s = degradation(kd + 1.0 / eta, eta, kd);
    CHECK(s.f_d == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  }
  SUBCASE("plate-study parameters") {
    const LocalState s = degradation(600.1, 0.002, 0.1);
    CHECK(s.f_d == doctest::Approx(0.30119421191220214).epsilon(1e-14));
    CHECK(s.d == doctest::Approx(0.69880578808779786).epsilon(1e-14));
  }
  SUBCASE("monotone non-increasing, d in [0,1)") {
    double prev = 1.0;
    for (double kappa = 0.0; kappa < 50.0; kappa += 0.37) {
      const LocalState s = degradation(kappa, 0.5, 0.3);
      CHECK(s.f_d <= prev);
      CHECK(s.d >= 0.0);
      CHECK(s.d < 1.0);
      prev = s.f_d;
    }
  }
}

TEST_CASE("internal energy composition") {
  ClosedFormParams p;
  p.mu_e = 1.0;
  p.lambda_e = 1.0;
  p.eta_d = 2.0;
  p.kappa_d = 0.1;
  p.c_d = 0.7;
  p.beta_d = 1000.0;
  const MaterialModel m(p);

  SUBCASE("virgin state") {
    CHECK(internal_energy(Tensor2d::identity(), 0.0, Vec3d{}, 0.0, m) == 0.0);
  }
  SUBCASE("pure penalty term") {
    CHECK(internal_energy(Tensor2d::identity(), 1.0, Vec3d{}, 0.0, m) ==
          doctest::Approx(500.0).epsilon(1e-14));
  }
  SUBCASE("sum of three independently evaluated terms") {
    std::mt19937 rng(24);
    for (int trial = 0; trial < 30; ++trial) {
      const RandomState s = random_admissible_state(rng);
      const Tensor2d c = right_cauchy_green(s.f);
      const double fd = degradation(s.kappa, p.eta_d, p.kappa_d).f_d;
      const double elast = fd * neo_hookean_energy(c, p.mu_e, p.lambda_e);
      const Vec3d ci_g = inverse(c) * s.grad_phi;
      const double grad = 0.5 * p.c_d * dot(s.grad_phi, ci_g);
      const double plty = 0.5 * p.beta_d * (s.phi - s.kappa) * (s.phi - s.kappa);
      const double full = internal_energy(s.f, s.phi, s.grad_phi, s.kappa, m);
      CHECK(full == doctest::Approx(elast + grad + plty).epsilon(1e-12));
    }
  }
}

TEST_CASE("PK1 against the analytic neo-Hookean expression") {
  ClosedFormParams p;
  p.mu_e = 1.7;
  p.lambda_e = 2.9;
  p.kappa_d = 10.0;  // stay below threshold: undamaged
  const MaterialModel m(p);
  for (double stretch : {1.1, 1.5, 2.0}) {
    const Tensor2d f = Tensor2d::diag(stretch, 1.0, 1.0);
    const Tensor2d pk1 = pk1_stress(f, 0.0, Vec3d{}, 0.0, m);
    const Tensor2d ref = analytic_nh_pk1(f, p.mu_e, p.lambda_e);
    for (int k = 0; k < 9; ++k)
      CHECK(pk1.e[k] == doctest::Approx(ref.e[k]).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("degradation scales the elastic stress linearly") {
  ClosedFormParams p;
  p.mu_e = 1.7;
  p.lambda_e = 2.9;
  p.eta_d = 1.0;
  p.kappa_d = 0.0;
  const MaterialModel m(p);
  const Tensor2d f = Tensor2d::diag(1.4, 1.0, 1.0);
  // f_d = 0.5 at kappa = ln 2
  const double kappa = std::log(2.0);
  const Tensor2d degraded = pk1_stress(f, kappa, Vec3d{}, kappa, m);
  const Tensor2d elastic = analytic_nh_pk1(f, p.mu_e, p.lambda_e);
  for (int k = 0; k < 9; ++k)
    CHECK(degraded.e[k] == doctest::Approx(0.5 * elastic.e[k]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("non-local conjugates") {
  ClosedFormParams p;
  p.c_d = 1.0;
  p.beta_d = 1000.0;
  const MaterialModel m(p);
  SUBCASE("equilibrated fields") {
    const auto c = nonlocal_conjugates(Tensor2d::identity(), 0.3, Vec3d{}, 0.3, m);
    for (int k = 0; k < 3; ++k) CHECK(c.y_vec[k] == 0.0);
    CHECK(c.y_scl == 0.0);
  }
  SUBCASE("identity metric") {
    const auto c = nonlocal_conjugates(Tensor2d::identity(), 0.0, Vec3d{1.0, 0.0, 0.0}, 0.0, m);
    CHECK(c.y_vec[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.y_vec[1] == 0.0);
  }
  SUBCASE("linear penalty") {
    const auto c = nonlocal_conjugates(Tensor2d::identity(), 0.31, Vec3d{}, 0.3, m);
    CHECK(c.y_scl == doctest::Approx(-10.0).epsilon(1e-12));
  }
  SUBCASE("general metric matches c_d C^{-1} grad phi") {
    std::mt19937 rng(25);
    for (int trial = 0; trial < 20; ++trial) {
      const RandomState s = random_admissible_state(rng);
      const auto c = nonlocal_conjugates(s.f, s.phi, s.grad_phi, s.kappa, m);
      const Vec3d ref = inverse(right_cauchy_green(s.f)) * s.grad_phi;
      for (int k = 0; k < 3; ++k)
        CHECK(c.y_vec[k] == doctest::Approx(p.c_d * ref[k]).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("driving force") {
  ClosedFormParams p;
  p.mu_e = 1.0;
  p.lambda_e = 1.0;
  p.eta_d = 0.002;
  p.kappa_d = 0.1;
  p.beta_d = 1000.0;
  const MaterialModel m(p);

  SUBCASE("virgin state") {
    CHECK(driving_force(Tensor2d::identity(), 0.0, Vec3d{}, 0.0, m) == 0.0);
  }
  SUBCASE("phi equal to kappa leaves only the strain energy") {
    const Tensor2d f = Tensor2d::diag(1.3, 0.95, 0.95);
    const double q = driving_force(f, 0.05, Vec3d{}, 0.05, m);
    CHECK(q == doctest::Approx(neo_hookean_energy(right_cauchy_green(f), 1.0, 1.0))
                   .epsilon(1e-14));
  }
  SUBCASE("hand-computed penalty contribution") {
    // psi(diag(4,1,1)) with unit moduli, f_d = 1 below threshold,
    // q = psi + 1000 * 0.001 / 0.002
    const double q = driving_force(Tensor2d::diag(2.0, 1.0, 1.0), 0.001, Vec3d{}, 0.0, m);
    CHECK(q == doctest::Approx(1.0470793263991554 + 500.0).epsilon(1e-13));
  }
  SUBCASE("degradation underflow flags the point as failed") {
    // d > 0.995 needs kappa - kappa_d > ln(200)/eta
    const double kappa = 0.1 + std::log(400.0) / p.eta_d;
    CHECK_THROWS_AS(driving_force(Tensor2d::identity(), 0.0, Vec3d{}, kappa, m),
                    ConstitutiveError);
  }
}

TEST_CASE("driving force is consistent with -dPsi/dd through the chain rule") {
  std::mt19937 rng(26);
  ClosedFormParams p;
  p.mu_e = 1.4;
  p.lambda_e = 0.9;
  p.eta_d = 2.0;
  p.kappa_d = 0.05;
  p.c_d = 0.3;
  p.beta_d = 50.0;
  const MaterialModel m(p);
  for (int trial = 0; trial < 30; ++trial) {
    RandomState s = random_admissible_state(rng);
    s.kappa = 0.1 + 0.5 * std::abs(s.phi);  // above threshold
    s.phi = s.kappa + 0.01;
    const double q = driving_force(s.f, s.phi, s.grad_phi, s.kappa, m);

    // reparameterize kappa(d) = kappa_d - ln(1-d)/eta and differentiate
    const double d0 = degradation(s.kappa, p.eta_d, p.kappa_d).d;
    using D = Dual<double, 1>;
    Tensor2<D> fd;
    for (int i = 0; i < 9; ++i) fd.e[i] = D(s.f.e[i]);
    Vec3<D> gp{D(s.grad_phi[0]), D(s.grad_phi[1]), D(s.grad_phi[2])};
    const D dvar = D::seeded(d0, 0);
    const D kappa_of_d = p.kappa_d - log(1.0 - dvar) / p.eta_d;
    const D psi = internal_energy(fd, D(s.phi), gp, kappa_of_d, m);
    CHECK(q == doctest::Approx(-psi.tang[0]).epsilon(1e-8));
  }
}

TEST_CASE("objectivity under superposed rotations") {
  std::mt19937 rng(27);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ClosedFormParams p;
  p.mu_e = 1.0;
  p.lambda_e = 2.0;
  p.eta_d = 1.0;
  p.kappa_d = 0.1;
  p.c_d = 0.5;
  p.beta_d = 10.0;
  const MaterialModel m(p);
  for (int trial = 0; trial < 50; ++trial) {
    const RandomState s = random_admissible_state(rng);
    const Tensor2d q = rotation(Vec3d{u(rng), u(rng), u(rng) + 1.5}, u(rng) * 3.0);
    const double base = internal_energy(s.f, s.phi, s.grad_phi, s.kappa, m);
    const double rotated = internal_energy(q * s.f, s.phi, s.grad_phi, s.kappa, m);
    CHECK(rotated == doctest::Approx(base).epsilon(1e-10));
  }
}
