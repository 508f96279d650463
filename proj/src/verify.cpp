#include "vem/verify.hpp"

#include <cmath>
#include <random>

namespace vem {

OptimalityResiduals optimality_residuals(const OcpProblem& p, const Trajectory& traj,
                                         const TransitionTable& table, GradientBundle& bundle,
                                         const MultiplierState& mu, const Vec& pi,
                                         const SolverConfig& /*cfg*/) {
  const Mat& pu_pc = compute_pu_pc(p, traj, table, bundle, mu, pi);
  OptimalityResiduals res;
  res.pu_pc_inf = pu_pc.size() > 0 ? pu_pc.cwiseAbs().maxCoeff() : 0.0;
  if (p.has_free_tf()) {
    double tv = bundle.lagrange_rate_tf;
    if (p.q > 0) tv += pi.dot(bundle.terminal_dir);
    res.transversality = std::abs(tv);
  } else {
    res.transversality = 0.0;  // Eq. not applicable with a fixed horizon
  }
  return res;
}

StateEvaluation evaluate_state(const OcpProblem& p, const Trajectory& traj,
                               const SolverConfig& cfg) {
  const TransitionTable table = build_transition_table(p, traj);
  GradientBundle bundle = build_gradient_bundle(p, traj, table, cfg);
  StateEvaluation ev;
  ev.mu = solve_mu(p, traj, table, bundle, cfg);
  ev.pi = solve_pi(p, traj, table, bundle, ev.mu, cfg);
  ev.mu.pi_ref = ev.pi;
  ev.residuals = optimality_residuals(p, traj, table, bundle, ev.mu, ev.pi, cfg);
  ev.lambda = recover_costate(p, traj, table, bundle, ev.mu, ev.pi);
  return ev;
}

ClassicResiduals classic_residuals(const OcpProblem& p, const Trajectory& traj,
                                   const Mat& lambda, const Vec& pi, const MultiplierState& mu,
                                   const SolverConfig& /*cfg*/) {
  const int N = traj.N();
  ClassicResiduals out;
  for (int k = 0; k < N; ++k) {
    const Vec xk = traj.x.col(k);
    const Vec uk = traj.u.col(k);
    const double tk = traj.grid.t(k);

    Vec lamdot;
    if (k == 0) {
      lamdot = (lambda.col(1) - lambda.col(0)) / (traj.grid.t(1) - traj.grid.t(0));
    } else if (k == N - 1) {
      lamdot = (lambda.col(N - 1) - lambda.col(N - 2)) /
               (traj.grid.t(N - 1) - traj.grid.t(N - 2));
    } else {
      lamdot = (lambda.col(k + 1) - lambda.col(k - 1)) /
               (traj.grid.t(k + 1) - traj.grid.t(k - 1));
    }

    Vec adj = lamdot + p.L_x(xk, uk, tk) + p.f_x(xk, uk, tk).transpose() * lambda.col(k);
    Vec hu = p.L_u(xk, uk, tk) + p.f_u(xk, uk, tk).transpose() * lambda.col(k);
    if (p.r > 0) {
      adj += p.C_x(xk, uk, tk).transpose() * mu.mu.col(k);
      hu += p.C_u(xk, uk, tk).transpose() * mu.mu.col(k);
      const Vec c = p.C(xk, uk, tk);
      for (int i = 0; i < p.r; ++i) {
        out.complementarity = std::max(out.complementarity, std::abs(mu.mu(i, k) * c[i]));
      }
    }
    out.adjoint_ode = std::max(out.adjoint_ode, adj.cwiseAbs().maxCoeff());
    out.hamiltonian_u = std::max(out.hamiltonian_u, hu.cwiseAbs().maxCoeff());
  }

  const Vec xf = traj.x.col(N - 1);
  const Vec uf = traj.u.col(N - 1);
  const double tf = traj.grid.tf;
  if (p.has_free_tf()) {
    double tv = p.L(xf, uf, tf) + lambda.col(N - 1).dot(p.f(xf, uf, tf)) + p.phi_t(xf, tf);
    if (p.q > 0) tv += pi.dot(p.g_tf(xf, tf));
    out.transversality_time = std::abs(tv);
  }
  Vec tvx = lambda.col(N - 1) - p.phi_x(xf, tf);
  if (p.q > 0) tvx -= p.g_xf(xf, tf).transpose() * pi;
  out.transversality_state = tvx.cwiseAbs().maxCoeff();
  return out;
}

double fd_gradient_check(const OcpProblem& p, const Trajectory& traj, const SolverConfig& cfg) {
  if (p.q != 0 || p.r != 0 || p.has_free_tf()) {
    throw VemError("fd_gradient_check needs an unconstrained fixed-horizon problem");
  }
  const Trajectory base = propagate_states(p, traj);
  const TransitionTable table = build_transition_table(p, base);
  const GradientBundle bundle = build_gradient_bundle(p, base, table, cfg);
  const double J0 = evaluate_cost(p, base);

  std::mt19937 rng(cfg.seed + 17);
  const double t0 = base.grid.t0, tf = base.grid.tf, T = tf - t0;
  std::uniform_real_distribution<double> center(t0 + 0.15 * T, tf - 0.15 * T);
  std::uniform_real_distribution<double> width(0.05 * T, 0.2 * T);
  std::uniform_int_distribution<int> comp(0, p.m - 1);

  const double eps = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const double c = center(rng), wdt = width(rng);
    const int j = comp(rng);
    Mat v = Mat::Zero(p.m, base.N());
    for (int k = 0; k < base.N(); ++k) {
      const double a = (base.grid.t(k) - c) / wdt;
      v(j, k) = std::exp(-0.5 * a * a);
    }
    Vec integrand(base.N());
    for (int k = 0; k < base.N(); ++k) integrand[k] = bundle.pu.col(k).dot(v.col(k));
    const double ip = quad(base.grid, integrand);

    Trajectory bumped = base;
    bumped.u += eps * v;
    const double J1 = evaluate_cost(p, propagate_states(p, bumped));
    const double fd = (J1 - J0) / eps;

    const double denom = std::max(std::abs(ip), 1e-12);
    const double rel = (std::abs(fd) < 1e-12 && std::abs(ip) < 1e-12)
                           ? 0.0
                           : std::abs(fd - ip) / denom;
    worst = std::max(worst, rel);
  }
  return worst;
}

ConstraintRateResiduals constraint_rate_residuals(const OcpProblem& p, const Trajectory& traj,
                                                  const SolverConfig& cfg) {
  const TransitionTable table = build_transition_table(p, traj);
  GradientBundle bundle = build_gradient_bundle(p, traj, table, cfg);
  const MultiplierState mu = solve_mu(p, traj, table, bundle, cfg);
  const Vec pi = solve_pi(p, traj, table, bundle, mu, cfg);

  ConstraintRateResiduals out;

  // Path-constraint rate rows: residual of the assembled system at the
  // accepted multipliers, scaled by the magnitude of its terms.
  const MuSystem sys = assemble_mu_system(p, traj, table, bundle, mu.active, cfg);
  const int dim = static_cast<int>(sys.rows.size());
  out.active_rows = dim;
  if (dim > 0) {
    Vec mu_vec(dim);
    for (int idx = 0; idx < dim; ++idx) {
      const auto [j, k] = sys.rows[idx];
      mu_vec[idx] = mu.mu(j, k);
    }
    for (int row = 0; row < dim; ++row) {
      const double res = sys.A.row(row).dot(mu_vec) - sys.b[row];
      double scale = std::abs(sys.b[row]);
      for (int c = 0; c < dim; ++c) scale += std::abs(sys.A(row, c) * mu_vec[c]);
      out.c_rate_rel = std::max(out.c_rate_rel, std::abs(res) / std::max(scale, 1e-12));
    }
  }

  // Terminal-rate identity M pi + r = 0.
  if (p.q > 0) {
    const Vec res = bundle.M * pi + bundle.r_vec;
    const double scale = (bundle.M * pi).cwiseAbs().sum() + bundle.r_vec.cwiseAbs().sum();
    out.g_rate_rel = res.cwiseAbs().maxCoeff() / std::max(scale, 1e-12);
  }
  return out;
}

}  // namespace vem
