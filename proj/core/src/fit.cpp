#include "gedfem/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "gedfem/point_driver.hpp"

namespace gedfem {

void FitDataset::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!(samples[i].stretch > 0.0))
      throw ParseError("fit dataset: non-positive stretch at sample " + std::to_string(i));
}

FitDataset load_fit_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path);
  FitDataset data;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1) {
      std::string h = line;
      h.erase(std::remove_if(h.begin(), h.end(), ::isspace), h.end());
      std::transform(h.begin(), h.end(), h.begin(), ::tolower);
      if (h != "cycle,stretch,stress")
        throw ParseError(path + ":1: expected header 'cycle,stretch,stress'");
      continue;
    }
    std::istringstream ss(line);
    FitSample s;
    char c1 = 0, c2 = 0;
    if (!(ss >> s.cycle >> c1 >> s.stretch >> c2 >> s.stress) || c1 != ',' || c2 != ',')
      throw ParseError(path + ":" + std::to_string(lineno) + ": malformed row");
    data.samples.push_back(s);
  }
  data.validate();
  return data;
}

void save_fit_csv(const FitDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open dataset for writing: " + path);
  out << "cycle,stretch,stress\n";
  char buf[96];
  for (const FitSample& s : data.samples) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", s.cycle, s.stretch, s.stress);
    out << buf;
  }
}

namespace {

// Raw parameter vector layout (221 entries). Passthrough blocks and the a0
// skip are stored unconstrained and squared when the networks are built.
constexpr int kIcnnCount = 16 + 8 + 64 + 16 + 8 + 8 + 2 + 1;   // 123
constexpr int kYieldCount = 8 + 8 + 64 + 8 + 8 + 1 + 1;        // 98
constexpr int kParamCount = kIcnnCount + kYieldCount;          // 221

using TD = Dual<double, kParamCount>;
using TD1 = Dual<TD, 1>;

template <typename T>
struct Nets {
  IcnnWeightsT<T> icnn;
  MonotoneNetWeightsT<T> yield;
};

template <typename T>
Nets<T> build_nets(const std::array<T, kParamCount>& x) {
  Nets<T> n;
  int k = 0;
  for (int i = 0; i < kNetHiddenWidth; ++i)
    for (int j = 0; j < 2; ++j) n.icnn.wx1[i][j] = x[k++];
  for (int i = 0; i < kNetHiddenWidth; ++i) n.icnn.b1[i] = x[k++];
  for (int i = 0; i < kNetHiddenWidth; ++i)
    for (int j = 0; j < kNetHiddenWidth; ++j) {
      n.icnn.wz1[i][j] = x[k] * x[k];
      ++k;
    }
  for (int i = 0; i < kNetHiddenWidth; ++i)
    for (int j = 0; j < 2; ++j) n.icnn.wx2[i][j] = x[k++];
  for (int i = 0; i < kNetHiddenWidth; ++i) n.icnn.b2[i] = x[k++];
  for (int j = 0; j < kNetHiddenWidth; ++j) {
    n.icnn.wz2[j] = x[k] * x[k];
    ++k;
  }
  for (int j = 0; j < 2; ++j) n.icnn.wx3[j] = x[k++];
  n.icnn.b3 = x[k++];

  for (int i = 0; i < kNetHiddenWidth; ++i) {
    n.yield.w1[i] = x[k] * x[k];
    ++k;
  }
  for (int i = 0; i < kNetHiddenWidth; ++i) n.yield.b1[i] = x[k++];
  for (int i = 0; i < kNetHiddenWidth; ++i)
    for (int j = 0; j < kNetHiddenWidth; ++j) {
      n.yield.w2[i][j] = x[k] * x[k];
      ++k;
    }
  for (int i = 0; i < kNetHiddenWidth; ++i) n.yield.b2[i] = x[k++];
  for (int j = 0; j < kNetHiddenWidth; ++j) {
    n.yield.w3[j] = x[k] * x[k];
    ++k;
  }
  n.yield.a0 = x[k] * x[k];
  ++k;
  n.yield.b0 = x[k++];
  return n;
}

// Path kinematics are theta-independent; precompute them in doubles.
struct PathPoint {
  double i1g, i2g, di1g, di2g;  // invariants and their stretch-derivatives
  double psi_vol, dpsi_vol;
  double target;
};

std::vector<PathPoint> precompute_path(const FitDataset& data) {
  std::vector<PathPoint> path;
  path.reserve(data.samples.size());
  using D1 = Dual<double, 1>;
  for (const FitSample& s : data.samples) {
    const Tensor2<D1> f = uniaxial_deformation(D1::seeded(s.stretch, 0));
    const InvariantSet<D1> inv = invariants(right_cauchy_green(f));
    const D1 vol_lin = inv.j + 1.0 / inv.j - 2.0;
    const D1 vol = vol_lin * vol_lin;
    PathPoint p;
    p.i1g = inv.i1g.value;
    p.i2g = inv.i2g.value;
    p.di1g = inv.i1g.tang[0];
    p.di2g = inv.i2g.tang[0];
    p.psi_vol = vol.value;
    p.dpsi_vol = vol.tang[0];
    p.target = s.stress;
    path.push_back(p);
  }
  return path;
}

double estimate_mu(const FitDataset& data) {
  double num = 0.0, den = 0.0;
  for (const FitSample& s : data.samples) {
    const double x = s.stretch - 1.0;
    if (x > 1e-9 && x < 0.1) {
      num += s.stress * x;
      den += 3.0 * x * x;
    }
  }
  if (den <= 0.0) return 1.0;
  const double mu = num / den;
  return mu > 1e-12 ? mu : 1.0;
}

TD training_loss(const std::array<TD, kParamCount>& theta, const std::vector<PathPoint>& path,
                 double mu_e, double lambda_e, double eta_d, double kappa_d) {
  const Nets<TD> nets = build_nets(theta);
  const TD psi_iso_ref = icnn_eval(nets.icnn, TD(3.0), TD(3.0));
  TD kappa(0.0);
  TD loss(0.0);
  for (const PathPoint& p : path) {
    TD1 i1g;
    i1g.value = TD(p.i1g);
    i1g.tang[0] = TD(p.di1g);
    TD1 i2g;
    i2g.value = TD(p.i2g);
    i2g.tang[0] = TD(p.di2g);
    const TD1 psi_iso = icnn_eval(nets.icnn, i1g, i2g);
    // psi_e and its stretch derivative in one pass
    const TD psi_val = mu_e * (psi_iso.value - psi_iso_ref) + lambda_e * p.psi_vol;
    const TD dpsi = mu_e * psi_iso.tang[0] + TD(lambda_e * p.dpsi_vol);
    const TD n_of_q = monotone_eval(nets.yield, psi_val);
    if (value_of(n_of_q) > value_of(kappa)) kappa = n_of_q;
    const TD f_d = degradation_factor(kappa, eta_d, kappa_d);
    const TD predicted = f_d * dpsi;
    const TD err = predicted - p.target;
    loss += err * err;
  }
  return loss / double(path.size());
}

}  // namespace

std::vector<double> predict_nominal_stress(const DataDrivenParams& p,
                                           const std::vector<double>& stretches) {
  DataDrivenParams local = p;
  local.beta_d = 0.0;  // local limit: q = q_loc
  local.c_d = 0.0;
  const MaterialModel m{local};
  const auto samples = uniaxial_local_response(m, stretches);
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].nominal_stress;
  return out;
}

FitResult fit(const FitDataset& data, const TrainConfig& cfg) {
  data.validate();
  if (data.samples.empty()) throw ParseError("fit: empty dataset");

  const double mu_e = cfg.mu_e > 0.0 ? cfg.mu_e : estimate_mu(data);
  const std::vector<PathPoint> path = precompute_path(data);

  // Init: near-linear isochoric energy, near-identity yield map, small noise.
  std::mt19937 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::array<double, kParamCount> x{};
  for (double& v : x) v = noise(rng);
  x[kIcnnCount - 3] = 0.3 + noise(rng);  // wx3[0], direct I1G skip
  x[kIcnnCount + kYieldCount - 2] = 1.0; // a0 raw -> identity-like slope

  std::array<double, kParamCount> m{}, v{};
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double best_loss = std::numeric_limits<double>::infinity();
  std::array<double, kParamCount> best_x = x;

  FitResult result;
  std::array<TD, kParamCount> theta;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int i = 0; i < kParamCount; ++i) theta[i] = TD::seeded(x[i], i);
    const TD loss = training_loss(theta, path, mu_e, cfg.lambda_e, cfg.eta_d, cfg.kappa_d);
    result.epochs_run = epoch + 1;
    if (loss.value < best_loss) {
      best_loss = loss.value;
      best_x = x;
    }
    if (cfg.early_stop_loss > 0.0 && loss.value < cfg.early_stop_loss) break;
    const double corr1 = 1.0 - std::pow(b1, epoch + 1);
    const double corr2 = 1.0 - std::pow(b2, epoch + 1);
    for (int i = 0; i < kParamCount; ++i) {
      const double g = loss.tang[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      x[i] -= cfg.learning_rate * (m[i] / corr1) / (std::sqrt(v[i] / corr2) + eps);
    }
  }

  std::array<double, kParamCount> xb = best_x;
  const Nets<double> nets = build_nets(xb);
  result.params.mu_e = mu_e;
  result.params.lambda_e = cfg.lambda_e;
  result.params.eta_d = cfg.eta_d;
  result.params.kappa_d = cfg.kappa_d;
  result.params.c_d = cfg.c_d;
  result.params.beta_d = cfg.beta_d;
  result.params.gamma_d = cfg.gamma_d;
  result.params.psi_iso_net = nets.icnn;
  result.params.yield_net = nets.yield;

  // Report the loss through the exported public evaluation path.
  std::vector<double> stretches(data.samples.size());
  for (std::size_t i = 0; i < stretches.size(); ++i) stretches[i] = data.samples[i].stretch;
  const std::vector<double> pred = predict_nominal_stress(result.params, stretches);
  double mse = 0.0, smax = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - data.samples[i].stress;
    mse += e * e;
    smax = std::max(smax, std::abs(data.samples[i].stress));
  }
  mse /= double(pred.size());
  result.final_loss = mse;
  result.rel_rmse = smax > 0.0 ? std::sqrt(mse) / smax : std::sqrt(mse);
  result.converged = result.rel_rmse < cfg.target_rel_rmse;
  return result;
}

}  // namespace gedfem
