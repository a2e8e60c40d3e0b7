#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "gedfem/fit.hpp"
#include "gedfem/point_driver.hpp"
#include "gedfem/selfcheck.hpp"
#include "gedfem/weights_io.hpp"

using namespace gedfem;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("zero network evaluates to zero") {
  IcnnWeights w{};  // softplus biases are zero: z = softplus(0), but the
                    // output layer weights vanish, so out = 0
  CHECK(icnn_eval(w, 3.7, 12.1) == 0.0);
  MonotoneNetWeights y{};
  CHECK(monotone_eval(y, 17.0) == 0.0);
}

TEST_CASE("identity yield network reproduces the closed-form map") {
  const MonotoneNetWeights w = MonotoneNetWeights::identity();
  for (double q : {-1.0, 0.0, 0.3, 17.5}) CHECK(monotone_eval(w, q) == doctest::Approx(q));
}

TEST_CASE("yield map vanishes at zero by construction") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const MonotoneNetWeights w = random_monotone(rng);
    CHECK(monotone_eval(w, 0.0) == 0.0);
  }
}

TEST_CASE("midpoint convexity of the ICNN") {
  std::mt19937 rng(32);
  std::uniform_real_distribution<double> u(3.0, 20.0);
  const IcnnWeights w = random_icnn(rng);
  for (int i = 0; i < 1000; ++i) {
    const double x0 = u(rng), x1 = u(rng), y0 = u(rng), y1 = u(rng);
    const double mid = icnn_eval(w, 0.5 * (x0 + y0), 0.5 * (x1 + y1));
    const double avg = 0.5 * (icnn_eval(w, x0, x1) + icnn_eval(w, y0, y1));
    CHECK(mid <= avg + 1e-12);
  }
}

TEST_CASE("monotonicity of the yield network") {
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> u(-10.0, 80.0);
  const MonotoneNetWeights w = random_monotone(rng);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    CHECK(monotone_eval(w, b) - monotone_eval(w, a) >= -1e-12);
  }
}

TEST_CASE("weight files round-trip bitwise") {
  std::mt19937 rng(34);
  const DataDrivenParams p = random_data_driven(rng);
  const std::string path = temp_path("gedfem_weights_rt.json");
  save_weights(p, path);
  const DataDrivenParams q = load_weights(path);
  CHECK(q.mu_e == p.mu_e);
  CHECK(q.lambda_e == p.lambda_e);
  CHECK(q.eta_d == p.eta_d);
  CHECK(q.kappa_d == p.kappa_d);
  for (int i = 0; i < kNetHiddenWidth; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(q.psi_iso_net.wx1[i][j] == p.psi_iso_net.wx1[i][j]);
      CHECK(q.psi_iso_net.wx2[i][j] == p.psi_iso_net.wx2[i][j]);
    }
    CHECK(q.psi_iso_net.b1[i] == p.psi_iso_net.b1[i]);
    CHECK(q.psi_iso_net.b2[i] == p.psi_iso_net.b2[i]);
    for (int j = 0; j < kNetHiddenWidth; ++j) {
      CHECK(q.psi_iso_net.wz1[i][j] == p.psi_iso_net.wz1[i][j]);
      CHECK(q.yield_net.w2[i][j] == p.yield_net.w2[i][j]);
    }
    CHECK(q.psi_iso_net.wz2[i] == p.psi_iso_net.wz2[i]);
    CHECK(q.yield_net.w1[i] == p.yield_net.w1[i]);
    CHECK(q.yield_net.b1[i] == p.yield_net.b1[i]);
    CHECK(q.yield_net.b2[i] == p.yield_net.b2[i]);
    CHECK(q.yield_net.w3[i] == p.yield_net.w3[i]);
  }
  CHECK(q.psi_iso_net.wx3[0] == p.psi_iso_net.wx3[0]);
  CHECK(q.psi_iso_net.b3 == p.psi_iso_net.b3);
  CHECK(q.yield_net.a0 == p.yield_net.a0);
  CHECK(q.yield_net.b0 == p.yield_net.b0);
  std::filesystem::remove(path);
}

TEST_CASE("weight file validation") {
  std::mt19937 rng(35);
  DataDrivenParams p = random_data_driven(rng);

  SUBCASE("negative effective passthrough is rejected") {
    p.psi_iso_net.wz1[0][1] = -0.25;
    const std::string text = weights_to_json(p);
    CHECK_THROWS_AS(weights_from_json(text, "mem"), WeightConstraintError);
  }
  SUBCASE("negative skip coefficient is rejected") {
    p.yield_net.a0 = -1.0;
    const std::string text = weights_to_json(p);
    CHECK_THROWS_AS(weights_from_json(text, "mem"), WeightConstraintError);
  }
  SUBCASE("wrong layer count is a schema error") {
    std::string text = weights_to_json(p);
    // drop the last psi_iso layer
    auto pos = text.find("\"psi_iso\"");
    REQUIRE(pos != std::string::npos);
    // easiest robust mutation: parse-level corruption via string replace of the
    // outer list is brittle; instead build a minimal document
    const std::string bad = R"({"model_version":1,"mu_e":1,"lambda_e":1,"eta_d":1,
      "kappa_d":0,"psi_iso":{"layers":[]},"yield":{"layers":[],"a0":0,"b0":0}})";
    CHECK_THROWS_WITH_AS(weights_from_json(bad, "mem"),
                         doctest::Contains("psi_iso.layers"), ParseError);
  }
  SUBCASE("malformed JSON names the context") {
    CHECK_THROWS_WITH_AS(weights_from_json("{not json", "ctx"), doctest::Contains("ctx"),
                         ParseError);
  }
  SUBCASE("missing field is reported") {
    const std::string bad = R"({"model_version":1})";
    CHECK_THROWS_AS(weights_from_json(bad, "mem"), ParseError);
  }
}

TEST_CASE("fit dataset CSV") {
  const std::string path = temp_path("gedfem_fit_rt.csv");
  FitDataset data;
  data.samples = {{0, 1.0, 0.0}, {0, 1.1, 0.42}, {1, 1.05, 0.2}};
  save_fit_csv(data, path);
  const FitDataset back = load_fit_csv(path);
  REQUIRE(back.samples.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.samples[i].cycle == data.samples[i].cycle);
    CHECK(back.samples[i].stretch == data.samples[i].stretch);
    CHECK(back.samples[i].stress == data.samples[i].stress);
  }
  std::filesystem::remove(path);

  SUBCASE("header is checked") {
    std::ofstream out(path);
    out << "a,b,c\n1,1.0,0.0\n";
    out.close();
    CHECK_THROWS_AS(load_fit_csv(path), ParseError);
    std::filesystem::remove(path);
  }
}

TEST_CASE("degenerate single-point fit keeps valid networks and zero loss") {
  FitDataset data;
  data.samples = {{0, 1.0, 0.0}};
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.eta_d = 2.0;
  cfg.kappa_d = 0.1;
  const FitResult r = fit(data, cfg);
  CHECK(r.final_loss == 0.0);
  CHECK_NOTHROW(r.params.psi_iso_net.validate());
  CHECK_NOTHROW(r.params.yield_net.validate());
}

TEST_CASE("fit on an undamaged response keeps damage near zero") {
  // generator: closed-form material that never crosses its threshold
  ClosedFormParams gen = ClosedFormParams::from_youngs(42.0, 0.45, 5.0, 1e6);
  const std::vector<double> stretches = stretch_ramp(1.3, 60);
  const auto samples = uniaxial_local_response(MaterialModel(gen), stretches);
  FitDataset data;
  for (const auto& s : samples) data.samples.push_back({0, s.stretch, s.nominal_stress});

  TrainConfig cfg;
  cfg.eta_d = 5.0;
  cfg.kappa_d = 0.25;  // small enough that an identity yield map would damage
  cfg.epochs = 1200;
  cfg.early_stop_loss = 1e-8;
  const FitResult r = fit(data, cfg);

  DataDrivenParams local = r.params;
  local.beta_d = 0.0;
  local.c_d = 0.0;
  const auto pred = uniaxial_local_response(MaterialModel(local), stretches);
  double max_d = 0.0;
  for (const auto& s : pred) max_d = std::max(max_d, s.damage);
  CHECK(max_d < 0.02);
  CHECK(r.rel_rmse < 0.05);
}
