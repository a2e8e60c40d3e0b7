#include "gedfem/studies.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "gedfem/history_io.hpp"
#include "gedfem/inp_reader.hpp"
#include "gedfem/point_driver.hpp"
#include "gedfem/solver.hpp"
#include "gedfem/vtk_writer.hpp"

namespace gedfem::studies {

namespace {

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  std::string s = buf;
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Problem uniaxial_single_element(const MaterialModel& m, double displacement) {
  Problem p;
  p.mesh = box_mesh(1.0, 1.0, 1.0, 1, 1, 1);
  p.material = m;
  p.dirichlet = {
      {"xmin", 0, 0.0, false},
      {"ymin", 1, 0.0, false},
      {"zmin", 2, 0.0, false},
      {"xmax", 0, displacement, true},
  };
  return p;
}

SingleElementResult single_element_study(const SingleElementOptions& opt) {
  ensure_dir(opt.out_dir);
  SingleElementResult result;

  auto run_one = [&](double eta_d, double kappa_d) {
    ClosedFormParams cp =
        ClosedFormParams::from_youngs(opt.e_mod, opt.nu, eta_d, kappa_d, 0.0, 0.0);
    const Problem p = uniaxial_single_element(MaterialModel(cp), opt.displacement);
    SolverConfig cfg;
    cfg.scheme = Scheme::local_only;
    cfg.steps = opt.steps;
    const Trajectory traj = load_stepping(p, cfg);
    SingleElementRun run;
    run.eta_d = eta_d;
    run.kappa_d = kappa_d;
    run.rows = traj.rows;
    run.termination = traj.termination;
    if (!opt.out_dir.empty() && !traj.rows.empty())
      write_history(traj.rows, opt.out_dir + "/single_element_eta" + format_param(eta_d) +
                                   "_kd" + format_param(kappa_d) + ".csv");
    return run;
  };

  for (double eta : opt.eta_values) result.eta_sweep.push_back(run_one(eta, opt.kappa_fixed));
  for (double kd : opt.kappa_values) result.kappa_sweep.push_back(run_one(opt.eta_fixed, kd));
  return result;
}

namespace {

Problem plate_problem(const Mesh& mesh, const MaterialModel& m, double displacement,
                      double imperfection_amplitude, double imperfection_center,
                      double imperfection_width) {
  Problem p;
  p.mesh = mesh;
  p.material = m;
  p.dirichlet = {
      {"xmin", 0, 0.0, false},
      {"origin", 1, 0.0, false},
      {"zmin", 2, 0.0, false},
      {"xmax", 0, displacement, true},
  };
  if (imperfection_amplitude != 0.0) {
    const double a = imperfection_amplitude;
    const double c = imperfection_center;
    const double w = imperfection_width;
    p.kappa_d_scale = [a, c, w](const Vec3d& x) {
      const double t = (x[0] - c) / w;
      return 1.0 - a * std::exp(-t * t);
    };
  }
  return p;
}

}  // namespace

const MeshStudyRun& MeshStudyResult::run(const std::string& mesh,
                                         const std::string& strategy) const {
  for (const MeshStudyRun& r : runs)
    if (r.mesh_name == mesh && r.strategy == strategy) return r;
  throw std::out_of_range("mesh study: no run " + mesh + "/" + strategy);
}

MeshStudyResult mesh_study(const MeshStudyOptions& opt) {
  ensure_dir(opt.out_dir);
  MeshStudyResult result;

  struct MeshCase {
    std::string name;
    Mesh mesh;
  };
  std::vector<MeshCase> meshes;
  meshes.push_back({"coarse", box_mesh(10.0, 10.0, 1.0, 6, 6, 1)});
  meshes.push_back({"refined", box_mesh(10.0, 10.0, 1.0, 12, 12, 1)});
  meshes.push_back({"graded", box_mesh_from_coords(graded_axis(10.0, 10, 2.0),
                                                   graded_axis(10.0, 10, 1.0),
                                                   graded_axis(1.0, 1, 1.0))});

  struct StrategyCase {
    std::string name;
    Scheme scheme;
    bool gradient;
  };
  const std::vector<StrategyCase> strategies = {
      {"local_staggered", Scheme::local_only, false},
      {"gradient_monolithic", Scheme::monolithic, true},
      {"gradient_staggered", Scheme::staggered, true},
  };

  for (const MeshCase& mc : meshes) {
    for (const StrategyCase& sc : strategies) {
      ClosedFormParams cp = ClosedFormParams::from_youngs(
          opt.e_mod, opt.nu, opt.eta_d, opt.kappa_d, sc.gradient ? opt.c_d : 0.0,
          sc.gradient ? opt.beta_d : 0.0);
      Problem p = plate_problem(mc.mesh, MaterialModel(cp), opt.displacement,
                                opt.imperfection_amplitude, 5.0, opt.imperfection_width);
      SolverConfig cfg;
      cfg.scheme = sc.scheme;
      cfg.steps = opt.steps;
      cfg.threads = opt.threads;
      const Trajectory traj = load_stepping(p, cfg);

      MeshStudyRun run;
      run.mesh_name = mc.name;
      run.strategy = sc.name;
      run.rows = traj.rows;
      run.termination = traj.termination;
      run.element_d = element_damage(p, traj.final_state);
      run.localization_indicator =
          run.element_d.empty()
              ? 0.0
              : *std::max_element(run.element_d.begin(), run.element_d.end()) -
                    median(run.element_d);
      if (!opt.out_dir.empty()) {
        const std::string base = opt.out_dir + "/mesh_study_" + mc.name + "_" + sc.name;
        if (!traj.rows.empty()) write_history(traj.rows, base + ".csv");
        write_vtk(p, traj.final_state, cfg.scheme, base + ".vtk");
      }
      result.runs.push_back(std::move(run));
    }
  }

  if (!opt.out_dir.empty()) {
    std::ofstream summary(opt.out_dir + "/mesh_study_summary.csv");
    summary << "mesh,strategy,final_load_factor,final_max_d,localization_indicator,"
               "termination\n";
    for (const MeshStudyRun& r : result.runs) {
      const double lf = r.rows.empty() ? 0.0 : r.rows.back().load_factor;
      const double md = r.rows.empty() ? 0.0 : r.rows.back().max_d;
      summary << r.mesh_name << "," << r.strategy << "," << lf << "," << md << ","
              << r.localization_indicator << "," << static_cast<int>(r.termination) << "\n";
    }
  }
  return result;
}

NotchedPlateResult notched_plate_study(const NotchedPlateOptions& opt) {
  ensure_dir(opt.out_dir);
  NotchedPlateResult result;

  auto make_mesh = [&](int nx, int ny) {
    return notched_plate_mesh(opt.lx, opt.ly, opt.lz, nx, ny, 1, opt.notch_radius);
  };
  Mesh coarse = opt.mesh_inp_path.empty() ? make_mesh(opt.coarse_nx, opt.coarse_ny)
                                          : parse_inp(opt.mesh_inp_path);

  ClosedFormParams cp = ClosedFormParams::from_youngs(opt.e_mod, opt.nu, opt.eta_d, opt.kappa_d,
                                                      opt.c_d, opt.beta_d);
  const MaterialModel material(cp);

  auto run_case = [&](const Mesh& mesh, int steps, const std::string& label) {
    Problem p = plate_problem(mesh, material, opt.displacement, 0.0, 0.0, 1.0);
    SolverConfig cfg;
    cfg.scheme = Scheme::monolithic;
    cfg.steps = steps;
    cfg.threads = opt.threads;
    const Trajectory traj = load_stepping(p, cfg);
    NotchedRun run;
    run.label = label;
    run.steps = steps;
    run.elements = mesh.element_count();
    run.rows = traj.rows;
    run.element_d = element_damage(p, traj.final_state);
    run.element_centroid_x.resize(mesh.element_count());
    for (int e = 0; e < mesh.element_count(); ++e) {
      double cx = 0.0;
      for (int a = 0; a < 8; ++a) cx += mesh.nodes[mesh.elements[e][a]][0] / 8.0;
      run.element_centroid_x[e] = cx;
    }
    if (!opt.out_dir.empty()) {
      const std::string base = opt.out_dir + "/notched_" + label;
      if (!traj.rows.empty()) write_history(traj.rows, base + ".csv");
      write_vtk(p, traj.final_state, cfg.scheme, base + ".vtk");
    }
    return run;
  };

  for (int steps : opt.step_counts)
    result.step_runs.push_back(
        run_case(coarse, steps, "coarse_steps" + std::to_string(steps)));

  const int base_steps = opt.step_counts.empty() ? 25 : opt.step_counts.front();
  result.mesh_runs.push_back(run_case(coarse, base_steps, "coarse"));
  result.mesh_runs.push_back(
      run_case(make_mesh(opt.medium_nx, opt.medium_ny), base_steps, "medium"));
  result.mesh_runs.push_back(run_case(make_mesh(opt.fine_nx, opt.fine_ny), base_steps, "fine"));
  return result;
}

SofteningStudyResult softening_study(const SofteningStudyOptions& opt) {
  ensure_dir(opt.out_dir);
  SofteningStudyResult result;

  ClosedFormParams cp =
      ClosedFormParams::from_youngs(opt.e_mod, opt.nu, opt.eta_d, opt.kappa_d, 0.0, 0.0);
  const MaterialModel m(cp);

  // Peak of the degraded uniaxial-stress response of the compressible
  // element: lateral stretch from P22 = 0 (degradation scales the whole
  // stress, so the lateral root is damage-independent), then s = f_d * P11.
  auto lateral_of = [&](double ax) {
    double lo = 0.5, hi = 1.1;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Tensor2d f = Tensor2d::diag(ax, mid, mid);
      const double p22 = pk1_stress(f, 0.0, Vec3d{}, 0.0, m, Coupling::local_only)(1, 1);
      (p22 < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  for (int i = 1; i <= 400; ++i) {
    const double ax = 1.0 + 1.0 * i / 400.0;
    const double lat = lateral_of(ax);
    const Tensor2d f = Tensor2d::diag(ax, lat, lat);
    const double psi = neo_hookean_energy(right_cauchy_green(f), cp.mu_e, cp.lambda_e);
    const double fd = degradation(psi, cp.eta_d, cp.kappa_d).f_d;
    const double p11 = pk1_stress(f, 0.0, Vec3d{}, 0.0, m, Coupling::local_only)(0, 0);
    result.peak_nominal_stress = std::max(result.peak_nominal_stress, fd * p11);
  }

  Problem p;
  p.mesh = box_mesh(1.0, 1.0, 1.0, 1, 1, 1);
  p.material = m;
  p.dirichlet = {
      {"xmin", 0, 0.0, false},
      {"ymin", 1, 0.0, false},
      {"zmin", 2, 0.0, false},
  };
  p.tractions = {{"xmax", Vec3d(opt.traction_over_peak * result.peak_nominal_stress, 0.0, 0.0)}};

  // kappa resolved inside the kernel: softening makes the coupled Newton
  // fail at the limit point, which is what the continuation solver is for
  SolverConfig cfg;
  cfg.scheme = Scheme::monolithic;
  cfg.steps = opt.steps;

  result.plain = load_stepping(p, cfg);
  result.arc = arc_length_stepping(p, cfg);
  auto final_d = [](const Trajectory& t) {
    double d = 0.0;
    for (const HistoryRow& r : t.rows) d = std::max(d, r.max_d);
    return d;
  };
  result.plain_final_d = final_d(result.plain);
  result.arc_final_d = final_d(result.arc);

  if (!opt.out_dir.empty()) {
    if (!result.plain.rows.empty())
      write_history(result.plain.rows, opt.out_dir + "/softening_plain.csv");
    if (!result.arc.rows.empty())
      write_history(result.arc.rows, opt.out_dir + "/softening_arc.csv");
  }
  return result;
}

}  // namespace gedfem::studies
