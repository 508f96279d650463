#include "test_problems.hpp"

namespace vemtest {

using vem::ConstraintKind;
using vem::TerminalTimeMode;

OcpProblem lq_scalar() {
  OcpProblem p;
  p.n = 1;
  p.m = 1;
  p.t0 = 0.0;
  p.x0 = Vec::Zero(1);
  p.tf_mode = TerminalTimeMode::fixed_tf;
  p.fixed_tf_value = 1.0;
  p.f = [](const Vec&, const Vec& u, double) { return u; };
  p.f_x = [](const Vec&, const Vec&, double) { return Mat::Zero(1, 1); };
  p.f_u = [](const Vec&, const Vec&, double) { return Mat::Identity(1, 1); };
  p.L = [](const Vec&, const Vec& u, double) { return 0.5 * u.squaredNorm(); };
  p.L_x = [](const Vec&, const Vec&, double) { return Vec::Zero(1); };
  p.L_u = [](const Vec&, const Vec& u, double) { return u; };
  vem::fill_structural_defaults(p);
  return p;
}

OcpProblem lq_double_integrator(bool with_state_cost) {
  OcpProblem p;
  p.n = 2;
  p.m = 1;
  p.t0 = 0.0;
  p.x0 = Vec{{1.0, 0.0}};
  p.tf_mode = TerminalTimeMode::fixed_tf;
  p.fixed_tf_value = 1.0;
  p.f = [](const Vec& x, const Vec& u, double) { return Vec{{x[1], u[0]}}; };
  p.f_x = [](const Vec&, const Vec&, double) {
    Mat A(2, 2);
    A << 0, 1, 0, 0;
    return A;
  };
  p.f_u = [](const Vec&, const Vec&, double) {
    Mat B(2, 1);
    B << 0, 1;
    return B;
  };
  if (with_state_cost) {
    p.L = [](const Vec& x, const Vec& u, double) {
      return 0.5 * (x[0] * x[0] + u.squaredNorm());
    };
    p.L_x = [](const Vec& x, const Vec&, double) { return Vec{{x[0], 0.0}}; };
  } else {
    p.L = [](const Vec&, const Vec& u, double) { return 0.5 * u.squaredNorm(); };
    p.L_x = [](const Vec&, const Vec&, double) { return Vec::Zero(2); };
  }
  p.L_u = [](const Vec&, const Vec& u, double) { return u; };
  vem::fill_structural_defaults(p);
  return p;
}

OcpProblem double_integrator_terminal(const Vec& x0, const Vec& target, double tf) {
  OcpProblem p = lq_double_integrator(false);
  p.x0 = x0;
  p.fixed_tf_value = tf;
  p.q = 2;
  p.g = [target](const Vec& xf, double) -> Vec { return xf - target; };
  p.g_xf = [](const Vec&, double) { return Mat::Identity(2, 2); };
  p.g_tf = [](const Vec&, double) { return Vec::Zero(2); };
  return p;
}

OcpProblem scalar_control_bound(double ub, double c) {
  OcpProblem p = lq_scalar();
  p.r = 1;
  p.L = [c](const Vec&, const Vec& u, double) { return 0.5 * u.squaredNorm() - c * u[0]; };
  p.L_u = [c](const Vec&, const Vec& u, double) { return Vec{{u[0] - c}}; };
  p.C = [ub](const Vec&, const Vec& u, double) { return Vec{{u[0] - ub}}; };
  p.C_x = [](const Vec&, const Vec&, double) { return Mat::Zero(1, 1); };
  p.C_u = [](const Vec&, const Vec&, double) { return Mat::Identity(1, 1); };
  p.constraint_kinds = {ConstraintKind::pure_control};
  return p;
}

Trajectory controlled_trajectory(const OcpProblem& p, int N, double tf,
                                 const std::function<Vec(double)>& u) {
  Trajectory traj;
  traj.grid = vem::TimeGrid::uniform(N, p.t0, tf);
  traj.u.resize(p.m, N);
  traj.x = Mat::Zero(p.n, N);
  traj.x.col(0) = p.x0;
  for (int k = 0; k < N; ++k) traj.u.col(k) = u(traj.grid.t(k));
  return vem::propagate_states(p, traj);
}

}  // namespace vemtest
