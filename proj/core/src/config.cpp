#include "gedfem/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "gedfem/inp_reader.hpp"
#include "gedfem/weights_io.hpp"

namespace gedfem {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ParseError("config: " + path + ": " + what);
}

void expect_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) schema_error(path + "." + it.key(), "unknown key");
}

double get_num(const json& j, const std::string& path, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) schema_error(path + "." + key, "expected a number");
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) schema_error(path + "." + key, "expected an integer");
  return j[key].get<int>();
}

std::string get_str(const json& j, const std::string& path, const char* key,
                    const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) schema_error(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

template <typename T, std::size_t N>
std::array<T, N> get_array(const json& j, const std::string& path, const char* key,
                           const std::array<T, N>& fallback) {
  if (!j.contains(key)) return fallback;
  const json& a = j[key];
  if (!a.is_array() || a.size() != N)
    schema_error(path + "." + key, "expected an array of " + std::to_string(N) + " entries");
  std::array<T, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = a[i].get<T>();
  return out;
}

MeshSpec parse_mesh(const json& j, const std::string& path) {
  expect_keys(j, path, {"type", "size", "divisions", "ratios", "notch_radius", "path"});
  MeshSpec m;
  m.type = get_str(j, path, "type", "box");
  if (m.type != "box" && m.type != "box_graded" && m.type != "notched_plate" && m.type != "inp")
    schema_error(path + ".type", "expected box|box_graded|notched_plate|inp");
  m.size = get_array<double, 3>(j, path, "size", m.size);
  m.divisions = get_array<int, 3>(j, path, "divisions", m.divisions);
  m.ratios = get_array<double, 3>(j, path, "ratios", m.ratios);
  m.notch_radius = get_num(j, path, "notch_radius", 0.0);
  m.path = get_str(j, path, "path", "");
  if (m.type == "inp" && m.path.empty()) schema_error(path + ".path", "required for type inp");
  if (m.type == "notched_plate" && !(m.notch_radius > 0.0))
    schema_error(path + ".notch_radius", "must be positive for notched_plate");
  return m;
}

MaterialSpec parse_material(const json& j, const std::string& path) {
  expect_keys(j, path,
              {"variant", "E", "nu", "mu_e", "lambda_e", "eta_d", "kappa_d", "c_d", "beta_d",
               "gamma_d", "weights"});
  MaterialSpec m;
  m.variant = get_str(j, path, "variant", "closed_form");
  if (m.variant != "closed_form" && m.variant != "data_driven")
    schema_error(path + ".variant", "expected closed_form|data_driven");
  if (j.contains("E")) m.e_mod = get_num(j, path, "E", 0.0);
  if (j.contains("nu")) m.nu = get_num(j, path, "nu", 0.0);
  if (j.contains("mu_e")) m.mu_e = get_num(j, path, "mu_e", 0.0);
  if (j.contains("lambda_e")) m.lambda_e = get_num(j, path, "lambda_e", 0.0);
  m.eta_d = get_num(j, path, "eta_d", m.eta_d);
  m.kappa_d = get_num(j, path, "kappa_d", m.kappa_d);
  m.c_d = get_num(j, path, "c_d", m.c_d);
  m.beta_d = get_num(j, path, "beta_d", m.beta_d);
  m.gamma_d = get_num(j, path, "gamma_d", m.gamma_d);
  m.weights_path = get_str(j, path, "weights", "");
  if (m.variant == "closed_form") {
    const bool youngs = m.e_mod.has_value() && m.nu.has_value();
    const bool lame = m.mu_e.has_value() && m.lambda_e.has_value();
    if (!youngs && !lame)
      schema_error(path, "closed_form needs either E and nu or mu_e and lambda_e");
  } else if (m.weights_path.empty()) {
    schema_error(path + ".weights", "required for data_driven");
  }
  return m;
}

BcSpec parse_bc(const json& j, const std::string& path) {
  expect_keys(j, path, {"node_set", "dof", "value", "ramp", "traction"});
  BcSpec bc;
  bc.node_set = get_str(j, path, "node_set", "");
  if (bc.node_set.empty()) schema_error(path + ".node_set", "required");
  if (j.contains("traction")) {
    bc.traction = get_array<double, 3>(j, path, "traction", {0.0, 0.0, 0.0});
    if (j.contains("dof") || j.contains("value") || j.contains("ramp"))
      schema_error(path, "traction entries take no dof/value/ramp");
    return bc;
  }
  bc.dof = get_str(j, path, "dof", "");
  if (bc.dof != "ux" && bc.dof != "uy" && bc.dof != "uz" && bc.dof != "phi")
    schema_error(path + ".dof", "expected ux|uy|uz|phi");
  if (j.contains("value")) bc.value = get_num(j, path, "value", 0.0);
  if (j.contains("ramp")) bc.ramp = get_num(j, path, "ramp", 0.0);
  if (bc.value.has_value() == bc.ramp.has_value())
    schema_error(path, "exactly one of value or ramp is required");
  return bc;
}

json dump_mesh(const MeshSpec& m) {
  json j;
  j["type"] = m.type;
  j["size"] = m.size;
  j["divisions"] = m.divisions;
  if (m.type == "box_graded") j["ratios"] = m.ratios;
  if (m.type == "notched_plate") j["notch_radius"] = m.notch_radius;
  if (m.type == "inp") j["path"] = m.path;
  return j;
}

json dump_material(const MaterialSpec& m) {
  json j;
  j["variant"] = m.variant;
  if (m.e_mod) j["E"] = *m.e_mod;
  if (m.nu) j["nu"] = *m.nu;
  if (m.mu_e) j["mu_e"] = *m.mu_e;
  if (m.lambda_e) j["lambda_e"] = *m.lambda_e;
  j["eta_d"] = m.eta_d;
  j["kappa_d"] = m.kappa_d;
  j["c_d"] = m.c_d;
  j["beta_d"] = m.beta_d;
  j["gamma_d"] = m.gamma_d;
  if (!m.weights_path.empty()) j["weights"] = m.weights_path;
  return j;
}

}  // namespace

RunConfig RunConfig::parse_text(const std::string& text, const std::string& ctx) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(ctx + ": " + e.what());
  }
  expect_keys(root, ctx,
              {"mesh", "material", "boundary_conditions", "imperfection", "solver", "output",
               "seed"});
  RunConfig cfg;
  if (!root.contains("mesh")) schema_error(ctx + ".mesh", "required");
  cfg.mesh = parse_mesh(root["mesh"], ctx + ".mesh");
  if (!root.contains("material")) schema_error(ctx + ".material", "required");
  cfg.material = parse_material(root["material"], ctx + ".material");
  if (root.contains("boundary_conditions")) {
    const json& bcs = root["boundary_conditions"];
    if (!bcs.is_array()) schema_error(ctx + ".boundary_conditions", "expected an array");
    for (std::size_t i = 0; i < bcs.size(); ++i)
      cfg.boundary_conditions.push_back(
          parse_bc(bcs[i], ctx + ".boundary_conditions[" + std::to_string(i) + "]"));
  }
  if (root.contains("imperfection")) {
    const json& im = root["imperfection"];
    const std::string p = ctx + ".imperfection";
    expect_keys(im, p, {"amplitude", "center", "width"});
    ImperfectionSpec s;
    s.amplitude = get_num(im, p, "amplitude", 0.0);
    s.center = get_num(im, p, "center", 0.0);
    s.width = get_num(im, p, "width", 1.0);
    if (!(s.width > 0.0)) schema_error(p + ".width", "must be positive");
    cfg.imperfection = s;
  }
  if (root.contains("solver")) {
    const json& s = root["solver"];
    const std::string p = ctx + ".solver";
    expect_keys(s, p,
                {"scheme", "continuation", "steps", "newton_tol", "newton_max_iter", "local_tol",
                 "local_max_iter", "d_max", "max_halvings", "arc_radius", "arc_psi", "threads"});
    cfg.solver.scheme = get_str(s, p, "scheme", cfg.solver.scheme);
    scheme_from_string(cfg.solver.scheme);  // validates
    cfg.solver.continuation = get_str(s, p, "continuation", cfg.solver.continuation);
    if (cfg.solver.continuation != "load-stepping" && cfg.solver.continuation != "arc-length")
      schema_error(p + ".continuation", "expected load-stepping|arc-length");
    cfg.solver.steps = get_int(s, p, "steps", cfg.solver.steps);
    if (cfg.solver.steps <= 0) schema_error(p + ".steps", "must be positive");
    cfg.solver.newton_tol = get_num(s, p, "newton_tol", cfg.solver.newton_tol);
    cfg.solver.newton_max_iter = get_int(s, p, "newton_max_iter", cfg.solver.newton_max_iter);
    cfg.solver.local_tol = get_num(s, p, "local_tol", cfg.solver.local_tol);
    cfg.solver.local_max_iter = get_int(s, p, "local_max_iter", cfg.solver.local_max_iter);
    cfg.solver.d_max = get_num(s, p, "d_max", cfg.solver.d_max);
    cfg.solver.max_halvings = get_int(s, p, "max_halvings", cfg.solver.max_halvings);
    cfg.solver.arc_radius = get_num(s, p, "arc_radius", cfg.solver.arc_radius);
    cfg.solver.arc_psi = get_num(s, p, "arc_psi", cfg.solver.arc_psi);
    cfg.solver.threads = get_int(s, p, "threads", cfg.solver.threads);
    if (!(cfg.solver.newton_tol > 0.0) || !(cfg.solver.local_tol > 0.0))
      schema_error(p, "tolerances must be positive");
  }
  if (root.contains("output")) {
    const json& o = root["output"];
    const std::string p = ctx + ".output";
    expect_keys(o, p, {"directory", "fields", "write_every", "history"});
    cfg.output.directory = get_str(o, p, "directory", cfg.output.directory);
    if (o.contains("fields")) {
      if (!o["fields"].is_array()) schema_error(p + ".fields", "expected an array of strings");
      cfg.output.fields.clear();
      for (const auto& f : o["fields"]) cfg.output.fields.push_back(f.get<std::string>());
    }
    cfg.output.write_every = get_int(o, p, "write_every", cfg.output.write_every);
    cfg.output.history = get_str(o, p, "history", cfg.output.history);
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) schema_error(ctx + ".seed", "expected an unsigned integer");
    cfg.seed = root["seed"].get<unsigned>();
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_text(text, path);
}

std::string RunConfig::to_json_text() const {
  json root;
  root["mesh"] = dump_mesh(mesh);
  root["material"] = dump_material(material);
  json bcs = json::array();
  for (const BcSpec& bc : boundary_conditions) {
    json b;
    b["node_set"] = bc.node_set;
    if (bc.traction) {
      b["traction"] = *bc.traction;
    } else {
      b["dof"] = bc.dof;
      if (bc.value) b["value"] = *bc.value;
      if (bc.ramp) b["ramp"] = *bc.ramp;
    }
    bcs.push_back(b);
  }
  root["boundary_conditions"] = bcs;
  if (imperfection) {
    root["imperfection"] = {{"amplitude", imperfection->amplitude},
                            {"center", imperfection->center},
                            {"width", imperfection->width}};
  }
  root["solver"] = {{"scheme", solver.scheme},
                    {"continuation", solver.continuation},
                    {"steps", solver.steps},
                    {"newton_tol", solver.newton_tol},
                    {"newton_max_iter", solver.newton_max_iter},
                    {"local_tol", solver.local_tol},
                    {"local_max_iter", solver.local_max_iter},
                    {"d_max", solver.d_max},
                    {"max_halvings", solver.max_halvings},
                    {"arc_radius", solver.arc_radius},
                    {"arc_psi", solver.arc_psi},
                    {"threads", solver.threads}};
  root["output"] = {{"directory", output.directory},
                    {"fields", output.fields},
                    {"write_every", output.write_every},
                    {"history", output.history}};
  root["seed"] = seed;
  return root.dump(2);
}

bool semantically_equal(const RunConfig& a, const RunConfig& b) {
  return a.to_json_text() == b.to_json_text();
}

namespace {
std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  return base + "/" + path;
}
}  // namespace

Problem build_problem(const RunConfig& cfg, const std::string& base_dir) {
  Problem p;
  const MeshSpec& ms = cfg.mesh;
  if (ms.type == "box") {
    p.mesh = box_mesh(ms.size[0], ms.size[1], ms.size[2], ms.divisions[0], ms.divisions[1],
                      ms.divisions[2]);
  } else if (ms.type == "box_graded") {
    p.mesh = box_mesh_from_coords(graded_axis(ms.size[0], ms.divisions[0], ms.ratios[0]),
                                  graded_axis(ms.size[1], ms.divisions[1], ms.ratios[1]),
                                  graded_axis(ms.size[2], ms.divisions[2], ms.ratios[2]));
  } else if (ms.type == "notched_plate") {
    p.mesh = notched_plate_mesh(ms.size[0], ms.size[1], ms.size[2], ms.divisions[0],
                                ms.divisions[1], ms.divisions[2], ms.notch_radius);
  } else {
    p.mesh = parse_inp(resolve(base_dir, ms.path));
  }
  p.mesh.validate();

  const MaterialSpec& mat = cfg.material;
  if (mat.variant == "closed_form") {
    ClosedFormParams cp;
    if (mat.mu_e && mat.lambda_e) {
      cp.mu_e = *mat.mu_e;
      cp.lambda_e = *mat.lambda_e;
    } else {
      cp = ClosedFormParams::from_youngs(*mat.e_mod, *mat.nu, mat.eta_d, mat.kappa_d);
    }
    cp.eta_d = mat.eta_d;
    cp.kappa_d = mat.kappa_d;
    cp.c_d = mat.c_d;
    cp.beta_d = mat.beta_d;
    cp.gamma_d = mat.gamma_d;
    p.material = MaterialModel(cp);
  } else {
    DataDrivenParams dp = load_weights(resolve(base_dir, mat.weights_path));
    // config-level damage parameters override the file's values
    dp.eta_d = mat.eta_d;
    dp.kappa_d = mat.kappa_d;
    dp.c_d = mat.c_d;
    dp.beta_d = mat.beta_d;
    dp.gamma_d = mat.gamma_d;
    if (mat.mu_e) dp.mu_e = *mat.mu_e;
    if (mat.lambda_e) dp.lambda_e = *mat.lambda_e;
    p.material = MaterialModel(std::move(dp));
  }

  for (const BcSpec& bc : cfg.boundary_conditions) {
    if (bc.traction) {
      p.tractions.push_back({bc.node_set, Vec3d((*bc.traction)[0], (*bc.traction)[1],
                                                (*bc.traction)[2])});
      continue;
    }
    DirichletBC d;
    d.node_set = bc.node_set;
    d.dof = bc.dof == "ux" ? 0 : bc.dof == "uy" ? 1 : bc.dof == "uz" ? 2 : 3;
    d.ramped = bc.ramp.has_value();
    d.value = d.ramped ? *bc.ramp : *bc.value;
    p.dirichlet.push_back(d);
  }

  if (cfg.imperfection && cfg.imperfection->amplitude != 0.0) {
    const ImperfectionSpec im = *cfg.imperfection;
    p.kappa_d_scale = [im](const Vec3d& x) {
      const double t = (x[0] - im.center) / im.width;
      return 1.0 - im.amplitude * std::exp(-t * t);
    };
  }
  return p;
}

SolverConfig build_solver_config(const RunConfig& cfg) {
  SolverConfig s;
  s.scheme = scheme_from_string(cfg.solver.scheme);
  s.continuation = cfg.solver.continuation == "arc-length" ? Continuation::arc_length
                                                           : Continuation::load_stepping;
  s.steps = cfg.solver.steps;
  s.newton_tol = cfg.solver.newton_tol;
  s.newton_max_iter = cfg.solver.newton_max_iter;
  s.local_tol = cfg.solver.local_tol;
  s.local_max_iter = cfg.solver.local_max_iter;
  s.d_max = cfg.solver.d_max;
  s.max_halvings = cfg.solver.max_halvings;
  s.arc_radius = cfg.solver.arc_radius;
  s.arc_psi = cfg.solver.arc_psi;
  s.threads = cfg.solver.threads;
  return s;
}

}  // namespace gedfem
