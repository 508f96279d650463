#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vem/output.hpp"
#include "vem/problems.hpp"

namespace {

struct CliOptions {
  std::string problem;
  std::string config_path;
  std::string out_dir;
  int grid_points = -1;
  double tau_end = -1;
  double gain_k = -1;
  double gain_tf = -1;
  double barrier_kc = -1;
  double rtol = -1;
  double atol = -1;
  double fixed_tf = -1;
  int repropagate_every = std::numeric_limits<int>::min();
  long seed = -1;
};

void apply_config_file(vem::SolverConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + path);
  nlohmann::json j;
  in >> j;
  if (j.contains("grid_points")) cfg.N = j["grid_points"].get<int>();
  if (j.contains("tau_end")) cfg.tau_end = j["tau_end"].get<double>();
  if (j.contains("gain_k")) cfg.gain_k = j["gain_k"].get<double>();
  if (j.contains("gain_tf")) cfg.k_tf = j["gain_tf"].get<double>();
  if (j.contains("barrier_kc")) cfg.k_C = j["barrier_kc"].get<double>();
  if (j.contains("barrier_kg")) cfg.k_g = j["barrier_kg"].get<double>();
  if (j.contains("rtol")) cfg.rtol = j["rtol"].get<double>();
  if (j.contains("atol")) cfg.atol = j["atol"].get<double>();
  if (j.contains("residual_tol")) cfg.residual_tol = j["residual_tol"].get<double>();
  if (j.contains("repropagate_every")) cfg.repropagate_every = j["repropagate_every"].get<int>();
  if (j.contains("tikhonov")) cfg.tikhonov = j["tikhonov"].get<double>();
  if (j.contains("node_motion_correction"))
    cfg.node_motion_correction = j["node_motion_correction"].get<bool>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned>();
}

int run_solve(const CliOptions& opt, const CLI::App& sub) {
  const auto& registry = vem::builtin_problems();
  auto it = registry.find(opt.problem);
  if (it == registry.end()) {
    std::cerr << "unknown problem '" << opt.problem << "'. Available problems:\n";
    for (const auto& [name, _] : registry) std::cerr << "  " << name << "\n";
    return 1;
  }
  vem::BuiltinProblem bp = it->second();
  vem::SolverConfig cfg = bp.cfg;

  if (!opt.config_path.empty()) apply_config_file(cfg, opt.config_path);
  if (sub.count("--grid-points")) cfg.N = opt.grid_points;
  if (sub.count("--tau-end")) cfg.tau_end = opt.tau_end;
  if (sub.count("--gain-k")) cfg.gain_k = opt.gain_k;
  if (sub.count("--gain-tf")) cfg.k_tf = opt.gain_tf;
  if (sub.count("--barrier-kc")) cfg.k_C = opt.barrier_kc;
  if (sub.count("--rtol")) cfg.rtol = opt.rtol;
  if (sub.count("--atol")) cfg.atol = opt.atol;
  if (sub.count("--repropagate-every")) cfg.repropagate_every = opt.repropagate_every;
  if (sub.count("--seed")) cfg.seed = static_cast<unsigned>(opt.seed);
  if (sub.count("--fixed-tf")) {
    bp.ocp.tf_mode = vem::TerminalTimeMode::fixed_tf;
    bp.ocp.fixed_tf_value = opt.fixed_tf;
    cfg.k_tf = 0.0;
    if (bp.init) bp.init->tf = opt.fixed_tf;
    if (bp.fssop) bp.fssop->tf_guess = opt.fixed_tf;
  }

  try {
    std::cout << "[vem-oc] building initializer for " << bp.name << "\n";
    const vem::Trajectory init = bp.build_initializer();

    std::vector<vem::Snapshot> snapshots;
    const std::vector<double> targets = vem::snapshot_schedule(cfg.tau_end, 12);
    size_t next_target = 0;
    vem::SolveHooks hooks;
    hooks.observer = [&](double tau, const vem::Trajectory& traj, const vem::RhsEval&) {
      while (next_target < targets.size() && tau >= targets[next_target]) {
        vem::Snapshot snap;
        snap.tau = tau;
        snap.x = traj.x;
        snap.u = traj.u;
        snap.times.resize(traj.N());
        for (int k = 0; k < traj.N(); ++k) snap.times[k] = traj.grid.t(k);
        snapshots.push_back(std::move(snap));
        ++next_target;
      }
    };

    std::cout << "[vem-oc] evolving (tau_end " << cfg.tau_end << ", N " << cfg.N << ", stacked "
              << vem::stacked_dimension(bp.ocp, cfg.N) << " states)\n";
    const vem::SolveResult result = vem::solve(bp.ocp, init, cfg, hooks);

    const vem::StateEvaluation ev = vem::evaluate_state(bp.ocp, result.traj, cfg);
    if (!opt.out_dir.empty()) {
      vem::emit_outputs(bp.ocp, cfg, result, ev.lambda, ev.residuals, snapshots, opt.out_dir);
      std::cout << "[vem-oc] wrote results to " << opt.out_dir << "\n";
    }
    std::cout << "[vem-oc] tf = " << result.traj.grid.tf
              << ", J = " << vem::evaluate_cost(bp.ocp, result.traj);
    if (result.pi.size() > 0) {
      std::cout << ", pi = [" << result.pi.transpose() << "]";
    }
    std::cout << "\n[vem-oc] residuals: |pu_pc| = " << ev.residuals.pu_pc_inf
              << ", transversality = " << ev.residuals.transversality
              << (result.diag.converged ? " (converged)" : " (tau_end reached)") << "\n";
    return 0;
  } catch (const vem::StiffnessError& e) {
    std::cerr << "[vem-oc] solver error: " << e.what() << "\n";
    if (!e.diagnostics.records.empty()) {
      const auto& last = e.diagnostics.records.back();
      std::cerr << "[vem-oc] last state: tau " << last.tau << ", J " << last.J << ", tf "
                << last.tf << "\n";
    }
    return 2;
  } catch (const vem::VemError& e) {
    std::cerr << "[vem-oc] solver error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variation-evolution solver for constrained optimal control problems"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* sub = app.add_subcommand("solve", "run init + solve + verify on a named problem");
  sub->add_option("--problem", opt.problem, "problem name (example1, example2)")->required();
  sub->add_option("--config", opt.config_path, "JSON config file");
  sub->add_option("--grid-points", opt.grid_points, "number of time grid nodes");
  sub->add_option("--tau-end", opt.tau_end, "variation-time horizon");
  sub->add_option("--gain-k", opt.gain_k, "control gain (K = gain * I)");
  sub->add_option("--gain-tf", opt.gain_tf, "terminal-time gain");
  sub->add_option("--barrier-kc", opt.barrier_kc, "path-constraint barrier gain");
  sub->add_option("--rtol", opt.rtol, "integrator relative tolerance");
  sub->add_option("--atol", opt.atol, "integrator absolute tolerance");
  sub->add_option("--fixed-tf", opt.fixed_tf, "fix the terminal time to this value");
  sub->add_option("--repropagate-every", opt.repropagate_every,
                  "accepted steps between state restorations (<= 0 disables)");
  sub->add_option("--out", opt.out_dir, "output directory for csv/json results");
  sub->add_option("--seed", opt.seed, "seed for randomized verification directions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  return run_solve(opt, *sub);
}
