#include "vem/init.hpp"

#include <sstream>

namespace vem {

namespace {

Trajectory zero_control_start(const OcpProblem& p, int N, double tf) {
  Trajectory t;
  t.grid = TimeGrid::uniform(N, p.t0, tf);
  t.u = Mat::Zero(p.m, N);
  t.x = Mat::Zero(p.n, N);
  t.x.col(0) = p.x0;
  return propagate_states(p, t);
}

}  // namespace

Trajectory straight_line_init(const OcpProblem& p, const InitSpec& spec,
                              const SolverConfig& cfg) {
  Trajectory traj;
  traj.grid = TimeGrid::uniform(cfg.N, p.t0, spec.tf);
  traj.x.resize(p.n, cfg.N);
  traj.u.resize(p.m, cfg.N);
  for (int k = 0; k < cfg.N; ++k) {
    traj.x.col(k) = spec.x(traj.grid.t(k));
    traj.u.col(k) = spec.u(traj.grid.t(k));
  }

  const Trajectory prop = propagate_states(p, traj);
  double dyn = 0.0;
  for (int k = 0; k < cfg.N; ++k) {
    dyn = std::max(dyn, (traj.x.col(k) - prop.x.col(k)).cwiseAbs().maxCoeff());
  }
  const double scale = std::max(1.0, traj.x.cwiseAbs().maxCoeff());
  if (dyn > cfg.feas_dyn_tol * scale) {
    std::ostringstream os;
    os << "closed-form initializer violates the dynamics (residual " << dyn << ")";
    throw InfeasibleInitError(os.str());
  }
  const double viol = max_constraint_violation(p, traj);
  if (viol > cfg.active_tol) {
    std::ostringstream os;
    os << "closed-form initializer violates a path constraint by " << viol;
    throw InfeasibleInitError(os.str());
  }
  if (p.q > 0) {
    const double gres = p.g(traj.x.col(cfg.N - 1), traj.grid.tf).cwiseAbs().maxCoeff();
    if (gres > cfg.feas_g_tol * std::max(1.0, p.x0.cwiseAbs().maxCoeff())) {
      std::ostringstream os;
      os << "closed-form initializer violates the terminal constraint by " << gres;
      throw InfeasibleInitError(os.str());
    }
  }
  return traj;
}

Trajectory solve_fssop(const OcpProblem& p, const FssopOptions& opts, const SolverConfig& cfg) {
  if (p.q == 0 && p.r == 0) {
    return zero_control_start(p, cfg.N, opts.tf_guess);
  }

  OcpProblem derived = p;
  derived.tf_mode = TerminalTimeMode::fixed_tf;
  derived.fixed_tf_value = opts.tf_guess;
  derived.r = 0;
  derived.constraint_kinds.clear();
  fill_structural_defaults(derived);

  if (opts.cost_L) {
    derived.L = opts.cost_L;
    derived.L_x = opts.cost_L_x;
    derived.L_u = opts.cost_L_u;
    if (!derived.L_x || !derived.L_u) {
      throw InfeasibleInitError("a search cost override needs its derivatives as well");
    }
  } else if (p.r > 0) {
    Vec w = opts.weights.size() > 0 ? opts.weights : Vec::Ones(p.r);
    if (w.size() != p.r || w.minCoeff() <= 0.0) {
      throw InfeasibleInitError("search weights must be positive, one per path constraint");
    }
    bool all_pure_state = true;
    for (auto kind : p.constraint_kinds) {
      if (kind != ConstraintKind::pure_state) all_pure_state = false;
    }
    // With only pure-state constraints the control row of the search problem
    // would be degenerate; the small quadratic term keeps it well posed.
    const double eps = all_pure_state ? opts.smoothing_eps : 0.0;
    auto C = p.C;
    auto C_x = p.C_x;
    auto C_u = p.C_u;
    derived.L = [C, w, eps](const Vec& x, const Vec& u, double t) {
      return w.dot(C(x, u, t)) + 0.5 * eps * u.squaredNorm();
    };
    derived.L_x = [C_x, w](const Vec& x, const Vec& u, double t) -> Vec {
      return C_x(x, u, t).transpose() * w;
    };
    derived.L_u = [C_u, w, eps](const Vec& x, const Vec& u, double t) -> Vec {
      return C_u(x, u, t).transpose() * w + eps * u;
    };
  }

  SolverConfig run_cfg = cfg;
  run_cfg.k_tf = 0.0;
  run_cfg.k_g = opts.k_g;
  run_cfg.tau_end = opts.tau_end;

  const double g_gate = cfg.feas_g_tol * std::max(1.0, p.x0.cwiseAbs().maxCoeff());
  auto feasible_for_original = [&](const Trajectory& tr) {
    const Trajectory prop = propagate_states(p, tr);
    if (max_constraint_violation(p, prop) > cfg.active_tol) return false;
    if (p.q > 0 &&
        p.g(prop.x.col(prop.N() - 1), prop.grid.tf).cwiseAbs().maxCoeff() > g_gate) {
      return false;
    }
    return true;
  };

  SolveHooks hooks;
  hooks.skip_feasibility_gate = true;
  hooks.stop_predicate = [&](double, const Trajectory& tr) { return feasible_for_original(tr); };

  const Trajectory start = zero_control_start(derived, cfg.N, opts.tf_guess);
  const SolveResult search = solve(derived, start, run_cfg, hooks);
  Trajectory out = propagate_states(p, search.traj);

  if (!feasible_for_original(out)) {
    std::ostringstream os;
    os << "feasible-solution search failed: worst path violation "
       << max_constraint_violation(p, out);
    if (p.q > 0) {
      os << ", terminal residual "
         << p.g(out.x.col(out.N() - 1), out.grid.tf).cwiseAbs().maxCoeff();
    }
    throw InfeasibleInitError(os.str());
  }
  return out;
}

}  // namespace vem
