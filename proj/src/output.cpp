#include "vem/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace vem {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_file(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw VemError("cannot write " + path.string());
  }
  return out;
}

}  // namespace

std::vector<double> snapshot_schedule(double tau_end, int count) {
  std::vector<double> targets = {0.0};
  if (count < 2 || !(tau_end > 0)) return targets;
  const double lo = tau_end * 1e-3;
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    targets.push_back(lo * std::pow(tau_end / lo, f));
  }
  return targets;
}

void emit_outputs(const OcpProblem& p, const SolverConfig& cfg, const SolveResult& result,
                  const Mat& lambda, const OptimalityResiduals& residuals,
                  const std::vector<Snapshot>& snapshots, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw VemError("cannot create output directory " + out_dir.string());

  const Trajectory& traj = result.traj;
  const int N = traj.N();

  {
    auto out = open_file(out_dir / "trajectory.csv");
    out << "t";
    for (int i = 0; i < p.n; ++i) out << ",x" << i + 1;
    for (int i = 0; i < p.m; ++i) out << ",u" << i + 1;
    for (int i = 0; i < p.r; ++i) out << ",mu" << i + 1;
    for (int i = 0; i < p.n; ++i) out << ",lambda" << i + 1;
    out << "\n";
    for (int k = 0; k < N; ++k) {
      out << fmt(traj.grid.t(k));
      for (int i = 0; i < p.n; ++i) out << "," << fmt(traj.x(i, k));
      for (int i = 0; i < p.m; ++i) out << "," << fmt(traj.u(i, k));
      for (int i = 0; i < p.r; ++i) out << "," << fmt(result.mu.mu(i, k));
      for (int i = 0; i < p.n; ++i) out << "," << fmt(lambda(i, k));
      out << "\n";
    }
  }

  {
    auto out = open_file(out_dir / "history.csv");
    out << "tau,J,tf,g_norm,maxC,pu_pc_inf,transversality\n";
    for (const auto& rec : result.diag.records) {
      out << fmt(rec.tau) << "," << fmt(rec.J) << "," << fmt(rec.tf) << "," << fmt(rec.g_norm)
          << "," << fmt(rec.max_c_violation) << "," << fmt(rec.pu_pc_inf) << ","
          << fmt(rec.transversality) << "\n";
    }
  }

  {
    nlohmann::json j;
    j["tf"] = traj.grid.tf;
    j["J"] = evaluate_cost(p, traj);
    j["pi"] = std::vector<double>(result.pi.data(), result.pi.data() + result.pi.size());
    j["residuals"] = {{"pu_pc_inf", residuals.pu_pc_inf},
                      {"transversality", residuals.transversality},
                      {"g_norm", terminal_residual_norm(p, traj)},
                      {"max_c_violation", max_constraint_violation(p, traj)}};
    j["steps"] = {{"accepted", result.diag.accepted_steps},
                  {"rejected", result.diag.rejected_steps},
                  {"rhs_evals", result.diag.rhs_evals},
                  {"converged", result.diag.converged}};
    j["config"] = {{"gain_k", cfg.gain_k},
                   {"k_tf", cfg.k_tf},
                   {"k_C", cfg.k_C},
                   {"k_g", cfg.k_g},
                   {"rtol", cfg.rtol},
                   {"atol", cfg.atol},
                   {"tau_end", cfg.tau_end},
                   {"grid_points", cfg.N},
                   {"active_tol", cfg.active_tol},
                   {"sign_tol", cfg.sign_tol},
                   {"residual_tol", cfg.residual_tol},
                   {"repropagate_every", cfg.repropagate_every},
                   {"tikhonov", cfg.tikhonov},
                   {"node_motion_correction", cfg.node_motion_correction},
                   {"seed", cfg.seed}};
    auto out = open_file(out_dir / "summary.json");
    out << j.dump(2) << "\n";
  }

  if (!snapshots.empty()) {
    fs::create_directories(out_dir / "snapshots", ec);
    int idx = 0;
    for (const auto& snap : snapshots) {
      char name[64];
      std::snprintf(name, sizeof(name), "snap_%03d.csv", idx++);
      auto out = open_file(out_dir / "snapshots" / name);
      out << "# tau = " << fmt(snap.tau) << "\n";
      out << "t";
      for (int i = 0; i < p.n; ++i) out << ",x" << i + 1;
      for (int i = 0; i < p.m; ++i) out << ",u" << i + 1;
      out << "\n";
      for (int k = 0; k < snap.times.size(); ++k) {
        out << fmt(snap.times[k]);
        for (int i = 0; i < p.n; ++i) out << "," << fmt(snap.x(i, k));
        for (int i = 0; i < p.m; ++i) out << "," << fmt(snap.u(i, k));
        out << "\n";
      }
    }
  }
}

}  // namespace vem
