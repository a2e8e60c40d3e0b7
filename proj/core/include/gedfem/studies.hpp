#pragma once

#include <string>
#include <vector>

#include "gedfem/fem.hpp"
#include "gedfem/fit.hpp"

namespace gedfem::studies {

// ---- single-element uniaxial sweep (local damage validation) ----

struct SingleElementOptions {
  double e_mod = 42.0;   // MPa
  double nu = 0.45;
  std::vector<double> eta_values{1.0, 5.0, 20.0, 100.0};  // 1/MPa
  double kappa_fixed = 0.5;                               // MPa
  std::vector<double> kappa_values{0.0, 0.5, 1.0, 2.0};   // MPa
  double eta_fixed = 5.0;
  double displacement = 0.5;  // mm on the unit cube
  int steps = 200;
  std::string out_dir;  // empty: no CSV output
};

struct SingleElementRun {
  double eta_d = 0.0;
  double kappa_d = 0.0;
  std::vector<HistoryRow> rows;
  RunTermination termination = RunTermination::completed;
};

struct SingleElementResult {
  std::vector<SingleElementRun> eta_sweep;    // kappa_d fixed
  std::vector<SingleElementRun> kappa_sweep;  // eta_d fixed
};

SingleElementResult single_element_study(const SingleElementOptions& opt);

// Single-element problem under symmetric uniaxial boundary conditions;
// shared by several studies and tests.
Problem uniaxial_single_element(const MaterialModel& m, double displacement);

// ---- plate mesh/solution-strategy study ----

struct MeshStudyOptions {
  double e_mod = 210.0;
  double nu = 0.3;
  double eta_d = 0.002;
  double kappa_d = 0.1;
  double c_d = 1.0;
  double beta_d = 1000.0;
  double displacement = 25.0;  // mm on the 10 mm plate
  int steps = 100;
  double imperfection_amplitude = 0.02;  // relative kappa_d dip at plate center
  double imperfection_width = 1.0;       // mm
  int threads = 1;
  std::string out_dir;
};

struct MeshStudyRun {
  std::string mesh_name;    // coarse | refined | graded
  std::string strategy;     // local_staggered | gradient_monolithic | gradient_staggered
  std::vector<HistoryRow> rows;
  std::vector<double> element_d;  // final committed state
  double localization_indicator = 0.0;  // max(d) - median(d) over elements
  RunTermination termination = RunTermination::completed;
};

struct MeshStudyResult {
  std::vector<MeshStudyRun> runs;
  const MeshStudyRun& run(const std::string& mesh, const std::string& strategy) const;
};

MeshStudyResult mesh_study(const MeshStudyOptions& opt);

// ---- notched plate convergence study ----

struct NotchedPlateOptions {
  double lx = 10.0, ly = 10.0, lz = 0.1;  // mm (1/10 geometric scale)
  double notch_radius = 1.5;              // mm
  int coarse_nx = 18, coarse_ny = 14;
  int medium_nx = 27, medium_ny = 21;
  int fine_nx = 36, fine_ny = 28;
  double e_mod = 210.0;
  double nu = 0.3;
  double eta_d = 0.02;
  double kappa_d = 0.1;
  // the penalty slaving cancels beta_d out of the effective smoothing length,
  // which is sqrt(c_d gamma_d / (eta_d f_d)); c_d = 0.1 gives about 3 mm here
  double c_d = 0.1;
  double beta_d = 1000.0;
  double displacement = 2.5;  // mm (25 % nominal strain)
  std::vector<int> step_counts{25, 50, 100};
  int threads = 1;
  std::string mesh_inp_path;  // optional: coarse mesh from an .inp fixture
  std::string out_dir;
};

struct NotchedRun {
  std::string label;
  int steps = 0;
  int elements = 0;
  std::vector<double> element_d;
  std::vector<double> element_centroid_x;
  std::vector<HistoryRow> rows;
};

struct NotchedPlateResult {
  std::vector<NotchedRun> step_runs;  // coarse mesh, varying step counts
  std::vector<NotchedRun> mesh_runs;  // coarse/medium/fine at step_counts[0]
};

NotchedPlateResult notched_plate_study(const NotchedPlateOptions& opt);

// ---- strong softening: arc length vs plain stepping ----

struct SofteningStudyOptions {
  double e_mod = 42.0;
  double nu = 0.45;
  double eta_d = 2.0;   // strong softening: the response peaks just past onset
  double kappa_d = 0.2;
  double traction_over_peak = 1.3;  // applied traction = factor * peak stress
  int steps = 40;
  std::string out_dir;
};

struct SofteningStudyResult {
  double peak_nominal_stress = 0.0;
  Trajectory plain;
  Trajectory arc;
  double plain_final_d = 0.0;
  double arc_final_d = 0.0;
};

SofteningStudyResult softening_study(const SofteningStudyOptions& opt);

}  // namespace gedfem::studies
