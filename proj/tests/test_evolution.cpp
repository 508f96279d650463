#include <cmath>

#include "doctest.h"
#include "test_problems.hpp"
#include "vem/problems.hpp"

using vem::Mat;
using vem::SolverConfig;
using vem::Vec;
using vemtest::controlled_trajectory;

TEST_CASE("propagation reproduces the descent initializer closed forms") {
  const vem::BuiltinProblem bp = vem::example2();
  vem::Trajectory traj;
  traj.grid = vem::TimeGrid::uniform(101, 0.0, 1.0);
  traj.x.resize(3, 101);
  traj.u.resize(1, 101);
  for (int k = 0; k < 101; ++k) {
    traj.x.col(k) = bp.init->x(traj.grid.t(k));
    traj.u.col(k) = bp.init->u(traj.grid.t(k));
  }
  const vem::Trajectory prop = vem::propagate_states(bp.ocp, traj);
  CHECK((prop.x - traj.x).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("zero dynamics freeze the state") {
  vem::OcpProblem p = vemtest::lq_scalar();
  p.f = [](const Vec&, const Vec&, double) { return Vec::Zero(1); };
  p.x0 = Vec{{3.0}};
  const auto traj = controlled_trajectory(p, 9, 1.0, [](double t) { return Vec{{t}}; });
  for (int k = 0; k < 9; ++k) CHECK(traj.x(0, k) == 3.0);
}

TEST_CASE("constant braking control gives the analytic parabola") {
  const vem::BuiltinProblem bp = vem::example1();
  const auto traj = controlled_trajectory(bp.ocp, 21, 2.0,
                                          [](double) { return Vec{{-1.0}}; });
  for (int k = 0; k < 21; ++k) {
    const double t = traj.grid.t(k);
    CHECK(traj.x(0, k) == doctest::Approx(-0.5 * t * t + t + 1.0).epsilon(1e-12));
    CHECK(traj.x(1, k) == doctest::Approx(1.0 - t).epsilon(1e-12));
  }
}

TEST_CASE("repeated propagation is idempotent") {
  const vem::BuiltinProblem bp = vem::example2();
  const auto t1 = vem::straight_line_init(bp.ocp, *bp.init, bp.cfg);
  const auto t2 = vem::propagate_states(bp.ocp, t1);
  const auto t3 = vem::propagate_states(bp.ocp, t2);
  CHECK((t2.x - t3.x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rates vanish at the optimum of the scalar quadratic problem") {
  const vem::OcpProblem p = vemtest::lq_scalar();
  const auto traj = controlled_trajectory(p, 9, 1.0, [](double) { return Vec::Zero(1); });
  const vem::RhsEval eval = vem::evolution_rhs(p, traj, SolverConfig{});
  CHECK(eval.rates.du.cwiseAbs().maxCoeff() == 0.0);
  CHECK(eval.rates.dx.cwiseAbs().maxCoeff() == 0.0);
  CHECK(eval.rates.dtf == 0.0);
  CHECK(eval.pu_pc_inf == 0.0);
}

TEST_CASE("fixed horizon pins the terminal-time rate") {
  const vem::OcpProblem p = vemtest::lq_double_integrator(true);
  const auto traj = controlled_trajectory(p, 21, 1.0, [](double t) { return Vec{{t}}; });
  SolverConfig cfg;
  cfg.k_tf = 0.5;  // ignored: the problem declares a fixed horizon
  const vem::RhsEval eval = vem::evolution_rhs(p, traj, cfg);
  CHECK(eval.rates.dtf == 0.0);
  CHECK(eval.transversality == 0.0);
}

TEST_CASE("node motion transports the state row as tf shrinks") {
  const vem::BuiltinProblem bp = vem::example1();
  const auto traj = controlled_trajectory(bp.ocp, 21, 6.0,
                                          [](double) { return Vec{{-0.4}}; });
  SolverConfig cfg = bp.cfg;
  cfg.node_motion_correction = false;
  const vem::RhsEval plain = vem::evolution_rhs(bp.ocp, traj, cfg);
  cfg.node_motion_correction = true;
  const vem::RhsEval moved = vem::evolution_rhs(bp.ocp, traj, cfg);
  for (int i : {5, 13, 20}) {
    const Vec f = bp.ocp.f(traj.x.col(i), traj.u.col(i), traj.grid.t(i));
    const Vec expected = plain.rates.dx.col(i) + f * traj.grid.s[i] * plain.rates.dtf;
    CHECK((moved.rates.dx.col(i) - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("stacked dimensions match the example settings") {
  const vem::BuiltinProblem e1 = vem::example1();
  const vem::BuiltinProblem e2 = vem::example2();
  CHECK(vem::stacked_dimension(e1.ocp, e1.cfg.N) == 124);
  CHECK(vem::stacked_dimension(e2.ocp, e2.cfg.N) == 405);
}

TEST_CASE("already optimal start terminates immediately") {
  const vem::OcpProblem p = vemtest::lq_scalar();
  const auto init = controlled_trajectory(p, 9, 1.0, [](double) { return Vec::Zero(1); });
  const vem::SolveResult res = vem::solve(p, init, SolverConfig{});
  CHECK(res.diag.converged);
  CHECK(res.diag.records.size() == 1);
  CHECK(res.diag.records.front().J == doctest::Approx(0.0));
}

TEST_CASE("infeasible initial trajectory is rejected before integration") {
  const vem::OcpProblem p =
      vemtest::double_integrator_terminal(Vec{{0.0, 0.0}}, Vec{{5.0, 0.0}}, 1.0);
  const auto init = controlled_trajectory(p, 9, 1.0, [](double) { return Vec::Zero(1); });
  CHECK_THROWS_AS(vem::solve(p, init, SolverConfig{}), vem::InfeasibleInitError);
}

TEST_CASE("short descent run decreases the cost monotonically") {
  const vem::BuiltinProblem bp = vem::example2();
  const auto init = vem::straight_line_init(bp.ocp, *bp.init, bp.cfg);
  SolverConfig cfg = bp.cfg;
  cfg.tau_end = 10.0;
  const vem::SolveResult res = vem::solve(bp.ocp, init, cfg);
  REQUIRE(res.diag.records.size() > 3);
  for (size_t i = 1; i < res.diag.records.size(); ++i) {
    CHECK(res.diag.records[i].J <=
          res.diag.records[i - 1].J + 10.0 * cfg.atol);
  }
  // Feasibility is maintained along the way.
  for (const auto& rec : res.diag.records) {
    CHECK(rec.g_norm <= std::max(res.diag.records.front().g_norm, 1e-4));
  }
  CHECK(res.traj.grid.tf < 1.0);
}
