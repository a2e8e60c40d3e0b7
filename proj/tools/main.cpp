// Command-line driver: general runs from a JSON config plus the canned
// parameter studies (single element, plate mesh comparison, notched plate),
// network fitting, and the property verification suite.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "gedfem/config.hpp"
#include "gedfem/fit.hpp"
#include "gedfem/history_io.hpp"
#include "gedfem/selfcheck.hpp"
#include "gedfem/solver.hpp"
#include "gedfem/studies.hpp"
#include "gedfem/vtk_writer.hpp"
#include "gedfem/weights_io.hpp"

namespace {

// Exit codes by failure category.
constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSolver = 4;
constexpr int kExitVerifyFailed = 5;

int run_command(const std::string& config_path, const std::string& out_dir_override,
                int steps_override, const std::string& scheme_override, int threads) {
  gedfem::RunConfig cfg = gedfem::RunConfig::parse_file(config_path);
  if (!out_dir_override.empty()) cfg.output.directory = out_dir_override;
  if (steps_override > 0) cfg.solver.steps = steps_override;
  if (!scheme_override.empty()) cfg.solver.scheme = scheme_override;
  if (threads > 0) cfg.solver.threads = threads;

  const std::string base_dir = std::filesystem::path(config_path).parent_path().string();
  gedfem::Problem problem = gedfem::build_problem(cfg, base_dir.empty() ? "." : base_dir);
  gedfem::SolverConfig solver = gedfem::build_solver_config(cfg);

  std::filesystem::create_directories(cfg.output.directory);
  const int every = cfg.output.write_every;
  gedfem::StepCallback on_commit;
  if (every > 0) {
    on_commit = [&](int step, const gedfem::SystemState& state, const gedfem::HistoryRow&) {
      if (step % every == 0)
        gedfem::write_vtk(problem, state, solver.scheme,
                          cfg.output.directory + "/state_" + std::to_string(step) + ".vtk");
    };
  }

  const gedfem::Trajectory traj = gedfem::run_solver(problem, solver, on_commit);
  if (!traj.rows.empty())
    gedfem::write_history(traj.rows, cfg.output.directory + "/" + cfg.output.history);
  gedfem::write_vtk(problem, traj.final_state, solver.scheme,
                    cfg.output.directory + "/state_final.vtk");

  std::cout << "committed steps: " << traj.rows.size() << "\n";
  if (!traj.rows.empty()) {
    const gedfem::HistoryRow& last = traj.rows.back();
    std::cout << "final load factor " << last.load_factor << ", max d " << last.max_d
              << ", max kappa " << last.max_kappa << " MPa\n";
  }
  switch (traj.termination) {
    case gedfem::RunTermination::completed:
      std::cout << "run completed\n";
      return kExitOk;
    case gedfem::RunTermination::damage_threshold:
      std::cout << "run terminated at the damage threshold\n";
      return kExitOk;
    default:
      std::cout << "run stopped early: " << traj.message << "\n";
      return kExitSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient-enhanced damage finite elements"};
  app.require_subcommand(1);

  std::string config_path, out_dir, scheme;
  int steps = 0, threads = 0;
  unsigned seed = 1234;

  auto* run = app.add_subcommand("run", "general simulation from a JSON config");
  run->add_option("config,--config", config_path, "run configuration (JSON)");
  run->add_option("--out-dir", out_dir, "override the output directory");
  run->add_option("--steps", steps, "override the load step count");
  run->add_option("--scheme", scheme, "override the scheme (monolithic|staggered|local)");
  run->add_option("--threads", threads, "assembly worker threads");

  auto* se = app.add_subcommand("single-element",
                                "uniaxial single-element damage parameter sweep");
  std::string se_out = "out/single_element";
  int se_steps = 200;
  se->add_option("--out-dir", se_out, "output directory");
  se->add_option("--steps", se_steps, "load steps per run");

  auto* ms = app.add_subcommand("mesh-study",
                                "plate mesh / solution-strategy comparison");
  std::string ms_out = "out/mesh_study";
  int ms_steps = 100, ms_threads = 1;
  ms->add_option("--out-dir", ms_out, "output directory");
  ms->add_option("--steps", ms_steps, "load steps per run");
  ms->add_option("--threads", ms_threads, "assembly worker threads");

  auto* np = app.add_subcommand("notched-plate", "notched plate convergence study");
  std::string np_out = "out/notched_plate";
  std::string np_mesh;
  int np_threads = 1;
  np->add_option("--out-dir", np_out, "output directory");
  np->add_option("--mesh", np_mesh, "coarse mesh .inp fixture (default: generated)");
  np->add_option("--threads", np_threads, "assembly worker threads");

  auto* fit_cmd = app.add_subcommand("fit", "train the networks on uniaxial data");
  std::string fit_data, fit_out;
  gedfem::TrainConfig tc;
  fit_cmd->add_option("data", fit_data, "CSV dataset (cycle,stretch,stress)")->required();
  fit_cmd->add_option("output", fit_out, "output weights file (JSON)")->required();
  fit_cmd->add_option("--eta-d", tc.eta_d, "damage saturation (1/MPa)");
  fit_cmd->add_option("--kappa-d", tc.kappa_d, "damage threshold (MPa)");
  fit_cmd->add_option("--mu-e", tc.mu_e, "stress scale (0: estimate from data)");
  fit_cmd->add_option("--lambda-e", tc.lambda_e, "volumetric modulus");
  fit_cmd->add_option("--epochs", tc.epochs, "training epochs");
  fit_cmd->add_option("--learning-rate", tc.learning_rate, "optimizer step size");
  fit_cmd->add_option("--seed", tc.seed, "initialization seed");

  auto* verify = app.add_subcommand("verify", "run the property verification suites");
  verify->add_option("--seed", seed, "random seed for the suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (config_path.empty()) {
        std::cerr << "error: run needs a config (positional or --config)\n";
        return kExitBadConfig;
      }
      return run_command(config_path, out_dir, steps, scheme, threads);
    }

    if (se->parsed()) {
      gedfem::studies::SingleElementOptions opt;
      opt.out_dir = se_out;
      opt.steps = se_steps;
      const auto result = gedfem::studies::single_element_study(opt);
      std::cout << "single-element sweep: " << result.eta_sweep.size() << " eta runs, "
                << result.kappa_sweep.size() << " kappa runs -> " << se_out << "\n";
      return kExitOk;
    }
    if (ms->parsed()) {
      gedfem::studies::MeshStudyOptions opt;
      opt.out_dir = ms_out;
      opt.steps = ms_steps;
      opt.threads = ms_threads;
      const auto result = gedfem::studies::mesh_study(opt);
      for (const auto& r : result.runs)
        std::cout << r.mesh_name << "/" << r.strategy << ": final max d "
                  << (r.rows.empty() ? 0.0 : r.rows.back().max_d) << ", localization "
                  << r.localization_indicator << "\n";
      return kExitOk;
    }
    if (np->parsed()) {
      gedfem::studies::NotchedPlateOptions opt;
      opt.out_dir = np_out;
      opt.mesh_inp_path = np_mesh;
      opt.threads = np_threads;
      const auto result = gedfem::studies::notched_plate_study(opt);
      for (const auto& r : result.step_runs)
        std::cout << r.label << " (" << r.elements << " elements): final max d "
                  << (r.rows.empty() ? 0.0 : r.rows.back().max_d) << "\n";
      for (const auto& r : result.mesh_runs)
        std::cout << r.label << " (" << r.elements << " elements): final max d "
                  << (r.rows.empty() ? 0.0 : r.rows.back().max_d) << "\n";
      return kExitOk;
    }
    if (fit_cmd->parsed()) {
      const gedfem::FitDataset data = gedfem::load_fit_csv(fit_data);
      const gedfem::FitResult result = gedfem::fit(data, tc);
      gedfem::save_weights(result.params, fit_out);
      std::cout << "fit: " << result.epochs_run << " epochs, loss " << result.final_loss
                << " MPa^2, relative RMSE " << result.rel_rmse * 100.0 << " %"
                << (result.converged ? "" : " (above target)") << "\n";
      return result.converged ? kExitOk : kExitSolver;
    }
    if (verify->parsed()) {
      const auto results = gedfem::run_selfchecks(seed, &std::cout);
      for (const auto& r : results)
        if (!r.pass) return kExitVerifyFailed;
      return kExitOk;
    }
  } catch (const gedfem::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const gedfem::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}
