// Acceptance suite: runs both shipped problems end to end and checks every
// acceptance criterion at its stated tolerance, one pass/fail line each.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "test_problems.hpp"
#include "vem/problems.hpp"
#include "vem/verify.hpp"

using vem::Mat;
using vem::Vec;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %s — %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  if (!pass) ++g_failures;
}

struct TimedRun {
  vem::SolveResult result;
  std::vector<vem::Trajectory> samples;  // states captured along the evolution
  double seconds = 0.0;
};

TimedRun run_with_samples(const vem::OcpProblem& p, const vem::Trajectory& init,
                          const vem::SolverConfig& cfg) {
  std::vector<double> targets;
  for (double f : {0.02, 0.1, 0.3, 0.6, 0.999}) targets.push_back(f * cfg.tau_end);
  TimedRun run;
  size_t next = 0;
  vem::SolveHooks hooks;
  hooks.observer = [&](double tau, const vem::Trajectory& traj, const vem::RhsEval&) {
    while (next < targets.size() && tau >= targets[next]) {
      run.samples.push_back(traj);
      ++next;
    }
  };
  const auto start = std::chrono::steady_clock::now();
  run.result = vem::solve(p, init, cfg, hooks);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  while (run.samples.size() < targets.size()) run.samples.push_back(run.result.traj);
  return run;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c, d);
  return buf;
}

void check_monotone_descent(const std::string& label, const vem::Diagnostics& diag,
                            double atol, double tf_final) {
  double worst_rise = 0.0;
  for (size_t i = 1; i < diag.records.size(); ++i) {
    worst_rise = std::max(worst_rise, diag.records[i].J - diag.records[i - 1].J);
  }
  const double final_gap = std::abs(diag.records.back().J - tf_final);
  report("criterion 6 (" + label + ")",
         worst_rise <= 10.0 * atol && final_gap < 1e-9,
         fmt("worst per-step J rise %.3g (allowed %.3g), |J - tf| %.3g", worst_rise,
             10.0 * atol, final_gap));
}

void check_rate_identities(const std::string& label, const vem::OcpProblem& p,
                           const std::vector<vem::Trajectory>& samples,
                           const vem::SolverConfig& cfg) {
  double worst_c = 0.0, worst_g = 0.0;
  int rows = 0;
  for (const auto& traj : samples) {
    const auto res = vem::constraint_rate_residuals(p, traj, cfg);
    worst_c = std::max(worst_c, res.c_rate_rel);
    worst_g = std::max(worst_g, res.g_rate_rel);
    rows += res.active_rows;
  }
  report("criterion 9 (" + label + ")", worst_c < 1e-6 && worst_g < 1e-6,
         fmt("max |dC/dtau + kC C| rel %.3g, max |dg/dtau| rel %.3g over 5 states "
             "(%d active rows total)",
             worst_c, worst_g, static_cast<double>(rows)));
}

}  // namespace

int main() {
  const double rt6 = std::sqrt(6.0);

  // ---- Example 1 ----------------------------------------------------------
  const vem::BuiltinProblem e1 = vem::example1();
  std::printf("building example1 initializer (minimum-energy search)...\n");
  const vem::Trajectory e1_init = e1.ocp.has_free_tf()
                                      ? vem::solve_fssop(e1.ocp, *e1.fssop, e1.cfg)
                                      : vem::Trajectory{};
  std::printf("running example1 (N=%d, tau_end=%g)...\n", e1.cfg.N, e1.cfg.tau_end);
  const TimedRun run1 = run_with_samples(e1.ocp, e1_init, e1.cfg);
  const vem::Trajectory& t1 = run1.result.traj;
  std::printf("  example1 done in %.1f s: tf = %.6f, %ld accepted steps\n", run1.seconds,
              t1.grid.tf, run1.result.diag.accepted_steps);

  report("criterion 1 (example1 terminal time)",
         std::abs(t1.grid.tf - (1.0 + rt6)) <= 0.02,
         fmt("tf %.4f vs 3.4495, |err| %.4f (runtime %.1f s)", t1.grid.tf,
             std::abs(t1.grid.tf - (1.0 + rt6)), run1.seconds));

  {
    const vem::StateEvaluation ev = vem::evaluate_state(e1.ocp, t1, e1.cfg);
    const bool pi_ok = ev.pi.size() == 2 && std::abs(ev.pi[0] - rt6 / 3.0) <= 0.03 &&
                       std::abs(ev.pi[1] + 1.0) <= 0.03;
    double lam1_err = 0.0;
    for (int k = 0; k < t1.N(); ++k) {
      lam1_err = std::max(lam1_err, std::abs(ev.lambda(0, k) - rt6 / 3.0));
    }
    // Least-squares slope of lambda_2 over time.
    double st = 0, stt = 0, sl = 0, stl = 0;
    for (int k = 0; k < t1.N(); ++k) {
      const double t = t1.grid.t(k), l = ev.lambda(1, k);
      st += t;
      stt += t * t;
      sl += l;
      stl += t * l;
    }
    const int N = t1.N();
    const double slope = (N * stl - st * sl) / (N * stt - st * st);
    const bool lam_ok = lam1_err <= 0.03 && std::abs(slope + rt6 / 3.0) <= 0.05;
    report("criterion 2 (example1 multipliers)", pi_ok && lam_ok,
           fmt("pi (%.4f, %.4f); lambda1 err %.4f", ev.pi.size() == 2 ? ev.pi[0] : 0.0,
               ev.pi.size() == 2 ? ev.pi[1] : 0.0, lam1_err) +
               fmt(", lambda2 slope %.4f vs -0.8165", slope));
  }

  {
    // Single sign change located within one grid interval of 1 + sqrt(6)/2.
    int crossings = 0, cross_k = -1;
    for (int k = 0; k + 1 < t1.N(); ++k) {
      if (t1.u(0, k) < 0.0 && t1.u(0, k + 1) >= 0.0) {
        ++crossings;
        cross_k = k;
      }
      if (t1.u(0, k) >= 0.0 && t1.u(0, k + 1) < 0.0) ++crossings;
    }
    bool ok = crossings == 1 && cross_k >= 0;
    double t_cross = 0.0, levels_err = 0.0;
    const double dt = t1.grid.dt(0);
    if (ok) {
      const double u0 = t1.u(0, cross_k), u1 = t1.u(0, cross_k + 1);
      t_cross = t1.grid.t(cross_k) + dt * (-u0) / (u1 - u0);
      ok = std::abs(t_cross - (1.0 + 0.5 * rt6)) <= dt;
      for (int k = 0; k < t1.N(); ++k) {
        const double t = t1.grid.t(k);
        if (t <= t_cross - dt) levels_err = std::max(levels_err, std::abs(t1.u(0, k) + 1.0));
        if (t >= t_cross + dt) levels_err = std::max(levels_err, std::abs(t1.u(0, k) - 1.0));
      }
      ok = ok && levels_err <= 0.05;
    }
    report("criterion 3 (example1 switch structure)", ok,
           fmt("crossings %.0f, t_cross %.4f vs 2.2247, levels err %.4f",
               static_cast<double>(crossings), t_cross, levels_err));
  }

  check_monotone_descent("example1", run1.result.diag, e1.cfg.atol, t1.grid.tf);

  {
    const auto table = vem::build_transition_table(e1.ocp, t1);
    const int last = t1.N() - 1;
    bool identity_exact = true;
    for (int i = 0; i <= last; ++i) {
      if ((table.phi(i, i) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() != 0.0)
        identity_exact = false;
    }
    double semi = 0.0;
    for (int k = last; k >= 0; k -= 7) {
      for (int j = 0; j <= k; j += 5) {
        for (int i = 0; i <= j; i += 5) {
          semi = std::max(semi,
                          (table.phi(k, i) - table.phi(k, j) * table.phi(j, i))
                              .cwiseAbs()
                              .maxCoeff());
        }
      }
    }
    double closed_form = 0.0;
    for (int j = 0; j <= last; ++j) {
      Mat expected(2, 2);
      expected << 1.0, t1.grid.t(last) - t1.grid.t(j), 0.0, 1.0;
      closed_form = std::max(closed_form, (table.phi(last, j) - expected).cwiseAbs().maxCoeff());
    }
    report("criterion 8 (transition-table properties)",
           identity_exact && semi < 1e-8 && closed_form < 1e-10,
           fmt("identity exact %.0f, semigroup %.3g, closed-form err %.3g",
               identity_exact ? 1.0 : 0.0, semi, closed_form));
  }

  check_rate_identities("example1", e1.ocp, run1.samples, e1.cfg);

  {
    vem::SolverConfig doubled = e1.cfg;
    doubled.gain_k = 0.4;
    std::printf("running example1 with doubled gain...\n");
    const TimedRun run1b = run_with_samples(e1.ocp, e1_init, doubled);
    const vem::Trajectory& t1b = run1b.result.traj;
    double diff = std::abs(t1b.grid.tf - t1.grid.tf);
    diff = std::max(diff, (t1b.u - t1.u).cwiseAbs().maxCoeff());
    diff = std::max(diff, (t1b.x - t1.x).cwiseAbs().maxCoeff());
    report("criterion 10 (gain invariance)", diff <= 10.0 * e1.cfg.residual_tol,
           fmt("sup-norm gap %.3g vs allowed %.3g (tf %.6f vs %.6f)", diff,
               10.0 * e1.cfg.residual_tol, t1b.grid.tf, t1.grid.tf));
  }

  // ---- Example 2 ----------------------------------------------------------
  const vem::BuiltinProblem e2 = vem::example2();
  std::printf("running example2 (N=%d, tau_end=%g)...\n", e2.cfg.N, e2.cfg.tau_end);
  const vem::Trajectory e2_init = vem::straight_line_init(e2.ocp, *e2.init, e2.cfg);
  const TimedRun run2 = run_with_samples(e2.ocp, e2_init, e2.cfg);
  const vem::Trajectory& t2 = run2.result.traj;
  std::printf("  example2 done in %.1f s: tf = %.6f, %ld accepted steps\n", run2.seconds,
              t2.grid.tf, run2.result.diag.accepted_steps);

  report("criterion 4 (example2 terminal time)", std::abs(t2.grid.tf - 0.800) <= 0.005,
         fmt("tf %.5f vs 0.800, |err| %.5f (runtime %.1f s)", t2.grid.tf,
             std::abs(t2.grid.tf - 0.800), run2.seconds));

  {
    double arc_lo = 1e30, arc_hi = -1e30, mu_min = 0.0;
    for (int k = 0; k < t2.N(); ++k) {
      if (run2.result.mu.mu(0, k) > 0.0) {
        arc_lo = std::min(arc_lo, t2.x(0, k));
        arc_hi = std::max(arc_hi, t2.x(0, k));
      }
      mu_min = std::min(mu_min, run2.result.mu.mu(0, k));
    }
    const double viol = vem::max_constraint_violation(e2.ocp, t2);
    const bool ok = std::abs(arc_lo - 0.56) <= 0.05 && std::abs(arc_hi - 1.06) <= 0.05 &&
                    mu_min >= -1e-8 && viol <= 1e-3;
    report("criterion 5 (example2 active arc)", ok,
           fmt("arc x in [%.3f, %.3f] vs [0.56, 1.06]", arc_lo, arc_hi) +
               fmt(", min mu %.2g, max C+ %.2g", mu_min, viol));
  }

  check_monotone_descent("example2", run2.result.diag, e2.cfg.atol, t2.grid.tf);
  check_rate_identities("example2", e2.ocp, run2.samples, e2.cfg);

  // ---- Cross-cutting ------------------------------------------------------
  {
    const vem::OcpProblem lq = vemtest::lq_double_integrator(true);
    const vem::Trajectory traj = vemtest::controlled_trajectory(
        lq, 101, 1.0, [](double t) { return Vec{{std::sin(2.0 * t)}}; });
    vem::SolverConfig cfg;
    cfg.seed = 1;
    const double err = vem::fd_gradient_check(lq, traj, cfg);
    report("criterion 7 (gradient oracle)", err < 1e-3,
           fmt("max relative error %.3g over 5 directions", err));
  }

  report("criterion 11 (stacked IVP dimensions)",
         vem::stacked_dimension(e1.ocp, e1.cfg.N) == 124 &&
             vem::stacked_dimension(e2.ocp, e2.cfg.N) == 405,
         fmt("example1 %.0f, example2 %.0f",
             static_cast<double>(vem::stacked_dimension(e1.ocp, e1.cfg.N)),
             static_cast<double>(vem::stacked_dimension(e2.ocp, e2.cfg.N))));

  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
