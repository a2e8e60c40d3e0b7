#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gedfem/fem.hpp"

namespace gedfem {

// Declarative run description, parsed from a JSON document. parse/serialize
// round-trip is field-by-field identical; unknown keys are schema errors
// reported with the path to the offending key.

struct MeshSpec {
  std::string type = "box";  // box | box_graded | notched_plate | inp
  std::array<double, 3> size{1.0, 1.0, 1.0};
  std::array<int, 3> divisions{1, 1, 1};
  std::array<double, 3> ratios{1.0, 1.0, 1.0};  // box_graded
  double notch_radius = 0.0;                    // notched_plate
  std::string path;                             // inp
};

struct MaterialSpec {
  std::string variant = "closed_form";  // closed_form | data_driven
  std::optional<double> e_mod, nu;      // closed-form convenience inputs
  std::optional<double> mu_e, lambda_e;
  double eta_d = 1.0;
  double kappa_d = 0.0;
  double c_d = 0.0;
  double beta_d = 0.0;
  double gamma_d = 1.0;
  std::string weights_path;  // data_driven
};

struct BcSpec {
  std::string node_set;
  std::string dof;  // ux | uy | uz | phi (Dirichlet entries)
  std::optional<double> value;          // held value
  std::optional<double> ramp;           // load-factor scaled target
  std::optional<std::array<double, 3>> traction;  // face loads from this set
};

struct ImperfectionSpec {
  double amplitude = 0.0;  // relative kappa_d dip
  double center = 0.0;     // x coordinate (mm)
  double width = 1.0;      // Gaussian width (mm)
};

struct OutputSpec {
  std::string directory = "out";
  std::vector<std::string> fields{"phi", "displacement", "d", "kappa", "von_mises"};
  int write_every = 0;  // 0: final state only
  std::string history = "history.csv";
};

struct SolverSpec {
  std::string scheme = "monolithic";
  std::string continuation = "load-stepping";  // load-stepping | arc-length
  int steps = 100;
  double newton_tol = 1e-8;
  int newton_max_iter = 25;
  double local_tol = 1e-10;
  int local_max_iter = 100;
  double d_max = 0.995;
  int max_halvings = 8;
  double arc_radius = -1.0;
  double arc_psi = 1.0;
  int threads = 1;
};

struct RunConfig {
  MeshSpec mesh;
  MaterialSpec material;
  std::vector<BcSpec> boundary_conditions;
  std::optional<ImperfectionSpec> imperfection;
  SolverSpec solver;
  OutputSpec output;
  unsigned seed = 1234;

  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_text(const std::string& text, const std::string& context);
  std::string to_json_text() const;
};

bool semantically_equal(const RunConfig& a, const RunConfig& b);

// Materialize the configuration: loads/creates the mesh and weights.
// Relative paths resolve against base_dir.
Problem build_problem(const RunConfig& cfg, const std::string& base_dir = ".");
SolverConfig build_solver_config(const RunConfig& cfg);

}  // namespace gedfem
