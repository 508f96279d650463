#include "vem/evolution.hpp"

#include <cmath>
#include <sstream>

#include "vem/dopri5.hpp"

namespace vem {

Trajectory propagate_states(const OcpProblem& p, const Trajectory& traj) {
  Trajectory out = traj;
  const int N = traj.N();
  Vec x = p.x0;
  out.x.col(0) = x;
  for (int i = 0; i + 1 < N; ++i) {
    const double ta = traj.grid.t(i);
    const double span = traj.grid.dt(i);
    const double h = span / 4.0;
    const Vec ua = traj.u.col(i), ub = traj.u.col(i + 1);
    auto u_at = [&](double t) -> Vec {
      const double theta = span > 0 ? (t - ta) / span : 0.0;
      return ua + theta * (ub - ua);
    };
    for (int s = 0; s < 4; ++s) {
      const double t = ta + s * h;
      const Vec k1 = p.f(x, u_at(t), t);
      const Vec k2 = p.f(x + 0.5 * h * k1, u_at(t + 0.5 * h), t + 0.5 * h);
      const Vec k3 = p.f(x + 0.5 * h * k2, u_at(t + 0.5 * h), t + 0.5 * h);
      const Vec k4 = p.f(x + h * k3, u_at(t + h), t + h);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!x.allFinite()) {
      std::ostringstream os;
      os << "state propagation became non-finite in interval " << i;
      throw PropagationError(os.str());
    }
    out.x.col(i + 1) = x;
  }
  return out;
}

double evaluate_cost(const OcpProblem& p, const Trajectory& traj) {
  const int N = traj.N();
  Vec l(N);
  for (int k = 0; k < N; ++k) {
    l[k] = p.L(traj.x.col(k), traj.u.col(k), traj.grid.t(k));
  }
  return p.phi(traj.x.col(N - 1), traj.grid.tf) + quad(traj.grid, l);
}

double max_constraint_violation(const OcpProblem& p, const Trajectory& traj) {
  if (p.r == 0) return 0.0;
  double worst = 0.0;
  for (int k = 0; k < traj.N(); ++k) {
    const Vec c = p.C(traj.x.col(k), traj.u.col(k), traj.grid.t(k));
    worst = std::max(worst, c.maxCoeff());
  }
  return std::max(worst, 0.0);
}

double terminal_residual_norm(const OcpProblem& p, const Trajectory& traj) {
  if (p.q == 0) return 0.0;
  return p.g(traj.x.col(traj.N() - 1), traj.grid.tf).norm();
}

int stacked_dimension(const OcpProblem& p, int N) { return p.n * N + p.m * N + 1; }

RhsEval evolution_rhs(const OcpProblem& p, const Trajectory& traj, const SolverConfig& cfg) {
  const int N = traj.N();
  const TransitionTable table = build_transition_table(p, traj);
  GradientBundle bundle = build_gradient_bundle(p, traj, table, cfg);

  RhsEval out;
  out.mu = solve_mu(p, traj, table, bundle, cfg);
  out.pi = solve_pi(p, traj, table, bundle, out.mu, cfg);
  out.mu.pi_ref = out.pi;
  const Mat& pu_pc = compute_pu_pc(p, traj, table, bundle, out.mu, out.pi);

  out.rates.du = -bundle.K * pu_pc;

  double tv = bundle.lagrange_rate_tf;
  if (p.q > 0) tv += out.pi.dot(bundle.terminal_dir);
  out.rates.dtf = p.has_free_tf() ? -bundle.k_tf_eff * tv : 0.0;
  out.transversality = p.has_free_tf() ? std::abs(tv) : 0.0;

  // State row: transport the control rates through the impulse response,
  // then account for the physical drift of node i as tf evolves.
  out.rates.dx = Mat::Zero(p.n, N);
  Vec acc = Vec::Zero(p.n);
  for (int i = 0; i + 1 < N; ++i) {
    const double half = 0.5 * traj.grid.dt(i);
    acc = table.phi(i + 1, i) *
              (acc + half * bundle.fu_node[i] * out.rates.du.col(i)) +
          half * bundle.fu_node[i + 1] * out.rates.du.col(i + 1);
    out.rates.dx.col(i + 1) = acc;
  }
  if (cfg.node_motion_correction && p.has_free_tf()) {
    for (int i = 1; i < N; ++i) {
      out.rates.dx.col(i) += bundle.f_node[i] * (traj.grid.s[i] * out.rates.dtf);
    }
  }

  if (!out.rates.du.allFinite() || !out.rates.dx.allFinite() ||
      !std::isfinite(out.rates.dtf)) {
    throw RhsError("non-finite evolution rate");
  }

  out.pu_pc_inf = pu_pc.size() > 0 ? pu_pc.cwiseAbs().maxCoeff() : 0.0;
  out.J = evaluate_cost(p, traj);
  out.g_norm = terminal_residual_norm(p, traj);
  out.max_c_violation = max_constraint_violation(p, traj);
  return out;
}

namespace {

Vec pack(const Trajectory& traj, int n, int m) {
  const int N = traj.N();
  Vec y(n * N + m * N + 1);
  for (int k = 0; k < N; ++k) y.segment(k * n, n) = traj.x.col(k);
  for (int k = 0; k < N; ++k) y.segment(n * N + k * m, m) = traj.u.col(k);
  y[n * N + m * N] = traj.grid.tf;
  return y;
}

void unpack(const Vec& y, int n, int m, Trajectory& traj) {
  const int N = traj.N();
  for (int k = 0; k < N; ++k) traj.x.col(k) = y.segment(k * n, n);
  for (int k = 0; k < N; ++k) traj.u.col(k) = y.segment(n * N + k * m, m);
  traj.grid.tf = y[n * N + m * N];
}

Vec pack_rates(const EvolutionRates& rates, int n, int m, int N) {
  Vec dy(n * N + m * N + 1);
  for (int k = 0; k < N; ++k) dy.segment(k * n, n) = rates.dx.col(k);
  for (int k = 0; k < N; ++k) dy.segment(n * N + k * m, m) = rates.du.col(k);
  dy[n * N + m * N] = rates.dtf;
  return dy;
}

void check_feasible_init(const OcpProblem& p, const Trajectory& init, const SolverConfig& cfg) {
  std::vector<std::string> issues;
  const Trajectory prop = propagate_states(p, init);
  double dyn = 0.0;
  for (int k = 0; k < init.N(); ++k) {
    dyn = std::max(dyn, (init.x.col(k) - prop.x.col(k)).cwiseAbs().maxCoeff());
  }
  const double xscale = std::max(1.0, init.x.cwiseAbs().maxCoeff());
  if (dyn > cfg.feas_dyn_tol * xscale) {
    std::ostringstream os;
    os << "dynamics residual " << dyn << " exceeds " << cfg.feas_dyn_tol * xscale;
    issues.push_back(os.str());
  }
  if (p.q > 0) {
    const double gres = p.g(init.x.col(init.N() - 1), init.grid.tf).cwiseAbs().maxCoeff();
    const double gtol = cfg.feas_g_tol * std::max(1.0, p.x0.cwiseAbs().maxCoeff());
    if (gres > gtol) {
      std::ostringstream os;
      os << "terminal residual " << gres << " exceeds " << gtol;
      issues.push_back(os.str());
    }
  }
  const double viol = max_constraint_violation(p, init);
  if (viol > cfg.active_tol) {
    std::ostringstream os;
    os << "path-constraint violation " << viol << " exceeds " << cfg.active_tol;
    issues.push_back(os.str());
  }
  if (!issues.empty()) {
    std::string what = "initial trajectory rejected:";
    for (const auto& s : issues) what += " " + s + ";";
    throw InfeasibleInitError(what);
  }
}

}  // namespace

SolveResult solve(const OcpProblem& p, const Trajectory& init, const SolverConfig& cfg,
                  const SolveHooks& hooks) {
  if (!(cfg.rtol > 0) || !(cfg.atol > 0) || !(cfg.tau_end > 0)) {
    throw VemError("integrator tolerances and tau_end must be positive");
  }
  if (!hooks.skip_feasibility_gate) check_feasible_init(p, init, cfg);

  const int n = p.n, m = p.m;
  const int N = init.N();
  Trajectory traj = init;
  Vec y = pack(traj, n, m);

  Diagnostics diag;
  RhsEval last_eval;
  Trajectory work = traj;  // scratch for stage evaluations

  auto rhs = [&](double /*tau*/, const Vec& yy) -> Vec {
    unpack(yy, n, m, work);
    if (!(work.grid.tf > work.grid.t0 + 1e-12)) {
      throw RhsError("terminal time collapsed onto the initial time");
    }
    last_eval = evolution_rhs(p, work, cfg);
    ++diag.rhs_evals;
    return pack_rates(last_eval.rates, n, m, N);
  };

  auto record = [&](double tau, const RhsEval& ev) {
    diag.records.push_back({tau, ev.J, work.grid.tf, ev.g_norm, ev.max_c_violation,
                            ev.pu_pc_inf, ev.transversality});
  };
  auto residuals_converged = [&](const RhsEval& ev) {
    if (!(ev.pu_pc_inf < cfg.residual_tol)) return false;
    if (p.has_free_tf() && !(ev.transversality < cfg.residual_tol)) return false;
    return true;
  };

  Dopri5Stepper stepper(cfg.rtol, cfg.atol);
  double tau = 0.0;
  Vec k1 = rhs(tau, y);
  RhsEval eval = last_eval;
  record(tau, eval);
  if (hooks.observer) hooks.observer(tau, work, eval);

  bool done = residuals_converged(eval);
  diag.converged = done;
  if (!done && hooks.stop_predicate && hooks.stop_predicate(tau, work)) done = true;

  double h = stepper.initial_step(y, k1, cfg.tau_end);
  int since_reprop = 0;
  while (!done) {
    h = std::min(h, cfg.tau_end - tau);
    const auto res = stepper.step(rhs, tau, y, k1, h);
    if (res.accepted) {
      ++diag.accepted_steps;
      tau = res.t_new;
      y = res.y_new;
      k1 = res.k_last;
      eval = last_eval;  // stage 7 is evaluated at the accepted state
      ++since_reprop;
      if (cfg.repropagate_every > 0 && since_reprop >= cfg.repropagate_every &&
          tau < cfg.tau_end) {
        unpack(y, n, m, work);
        Trajectory restored = propagate_states(p, work);
        y = pack(restored, n, m);
        k1 = rhs(tau, y);
        eval = last_eval;
        stepper.reset_controller();
        since_reprop = 0;
      }
      unpack(y, n, m, work);
      record(tau, eval);
      if (hooks.observer) hooks.observer(tau, work, eval);
      if (residuals_converged(eval)) {
        diag.converged = true;
        break;
      }
      if (hooks.stop_predicate && hooks.stop_predicate(tau, work)) break;
      if (tau >= cfg.tau_end) break;
    } else {
      ++diag.rejected_steps;
    }
    h = res.h_next;
    if (!(h > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, tau))) {
      throw StiffnessError("step size underflow in the variation-time integration", diag);
    }
    if (diag.accepted_steps + diag.rejected_steps > 2000000) {
      throw StiffnessError("variation-time integration exceeded the step budget", diag);
    }
  }

  SolveResult result;
  unpack(y, n, m, work);
  result.traj = (cfg.repropagate_every > 0) ? propagate_states(p, work) : work;
  const RhsEval final_eval = evolution_rhs(p, result.traj, cfg);
  result.mu = final_eval.mu;
  result.pi = final_eval.pi;
  result.diag = diag;
  result.diag.converged = diag.converged;
  return result;
}

}  // namespace vem
