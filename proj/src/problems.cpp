#include "vem/problems.hpp"

#include <cmath>

namespace vem {

Trajectory BuiltinProblem::build_initializer() const {
  if (init) return straight_line_init(ocp, *init, cfg);
  if (fssop) return solve_fssop(ocp, *fssop, cfg);
  throw InfeasibleInitError("builtin problem ships no initializer");
}

BuiltinProblem example1() {
  BuiltinProblem bp;
  bp.name = "example1";

  OcpProblem p;
  p.n = 2;
  p.m = 1;
  p.q = 2;
  p.r = 1;
  p.t0 = 0.0;
  p.x0 = Vec{{1.0, 1.0}};
  p.tf_mode = TerminalTimeMode::free_tf;

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

  // J = tf: phi = tf, L = 0.
  p.phi = [](const Vec&, double tf) { return tf; };
  p.phi_x = [](const Vec&, double) { return Vec::Zero(2); };
  p.phi_t = [](const Vec&, double) { return 1.0; };
  p.phi_xx = [](const Vec&, double) { return Mat::Zero(2, 2); };
  p.phi_tx = [](const Vec&, double) { return Vec::Zero(2); };

  p.g = [](const Vec& xf, double) { return xf; };
  p.g_xf = [](const Vec&, double) { return Mat::Identity(2, 2); };
  p.g_tf = [](const Vec&, double) { return Vec::Zero(2); };

  // The box -1 <= u <= 1 encoded as the single smooth constraint u^2 - 1 <= 0.
  p.C = [](const Vec&, const Vec& u, double) { return Vec{{u[0] * u[0] - 1.0}}; };
  p.C_x = [](const Vec&, const Vec&, double) { return Mat::Zero(1, 2); };
  p.C_u = [](const Vec&, const Vec& u, double) {
    Mat cu(1, 1);
    cu << 2.0 * u[0];
    return cu;
  };
  p.constraint_kinds = {ConstraintKind::pure_control};
  fill_structural_defaults(p);
  bp.ocp = p;

  SolverConfig cfg;
  cfg.gain_k = 0.2;
  cfg.k_tf = 0.1;
  cfg.k_C = 0.1;
  cfg.N = 41;
  cfg.rtol = 1e-3;
  cfg.atol = 1e-6;
  cfg.tau_end = 300.0;
  bp.cfg = cfg;

  FssopOptions fs;
  fs.tf_guess = 8.0;
  // The search run minimizes the transfer energy 0.5 \int u^2 dt.
  fs.cost_L = [](const Vec&, const Vec& u, double) { return 0.5 * u.squaredNorm(); };
  fs.cost_L_x = [](const Vec&, const Vec&, double) { return Vec::Zero(2); };
  fs.cost_L_u = [](const Vec&, const Vec& u, double) { return u; };
  bp.fssop = fs;

  const double rt6 = std::sqrt(6.0);
  AnalyticOracle oracle;
  oracle.tf = 1.0 + rt6;
  oracle.switch_times = {1.0 + 0.5 * rt6};
  oracle.u = [ts = 1.0 + 0.5 * rt6](double t) { return Vec{{t < ts ? -1.0 : 1.0}}; };
  oracle.x = [ts = 1.0 + 0.5 * rt6, rt6](double t) {
    if (t < ts) return Vec{{-0.5 * t * t + t + 1.0, -t + 1.0}};
    return Vec{{0.5 * t * t - (1.0 + rt6) * t + 3.5 + rt6, t - 1.0 - rt6}};
  };
  oracle.lambda = [rt6](double t) {
    return Vec{{rt6 / 3.0, -(rt6 / 3.0) * t + rt6 / 3.0 + 1.0}};
  };
  bp.oracle = oracle;

  ReferenceValues ref;
  ref.tf = 1.0 + rt6;
  bp.reference = ref;

  bp.validation_box.x_lo = Vec{{-3.0, -3.0}};
  bp.validation_box.x_hi = Vec{{3.0, 3.0}};
  bp.validation_box.u_lo = Vec{{-1.5}};
  bp.validation_box.u_hi = Vec{{1.5}};
  bp.validation_box.t_lo = 0.0;
  bp.validation_box.t_hi = 8.0;
  return bp;
}

BuiltinProblem example2() {
  BuiltinProblem bp;
  bp.name = "example2";

  const double grav = 10.0;
  OcpProblem p;
  p.n = 3;
  p.m = 1;
  p.q = 1;
  p.r = 1;
  p.t0 = 0.0;
  p.x0 = Vec::Zero(3);
  p.tf_mode = TerminalTimeMode::free_tf;

  p.f = [grav](const Vec& x, const Vec& u, double) {
    const double su = std::sin(u[0]), cu = std::cos(u[0]);
    return Vec{{x[2] * su, -x[2] * cu, grav * cu}};
  };
  p.f_x = [](const Vec&, const Vec& u, double) {
    const double su = std::sin(u[0]), cu = std::cos(u[0]);
    Mat A = Mat::Zero(3, 3);
    A(0, 2) = su;
    A(1, 2) = -cu;
    return A;
  };
  p.f_u = [grav](const Vec& x, const Vec& u, double) {
    const double su = std::sin(u[0]), cu = std::cos(u[0]);
    Mat B(3, 1);
    B << x[2] * cu, x[2] * su, -grav * su;
    return B;
  };

  p.phi = [](const Vec&, double tf) { return tf; };
  p.phi_x = [](const Vec&, double) { return Vec::Zero(3); };
  p.phi_t = [](const Vec&, double) { return 1.0; };
  p.phi_xx = [](const Vec&, double) { return Mat::Zero(3, 3); };
  p.phi_tx = [](const Vec&, double) { return Vec::Zero(3); };

  p.g = [](const Vec& xf, double) { return Vec{{xf[0] - 2.0}}; };
  p.g_xf = [](const Vec&, double) {
    Mat G(1, 3);
    G << 1, 0, 0;
    return G;
  };
  p.g_tf = [](const Vec&, double) { return Vec::Zero(1); };

  // Slope constraint on the descent plane.
  p.C = [](const Vec& x, const Vec&, double) {
    return Vec{{-0.5 * x[0] - x[1] - 0.35}};
  };
  p.C_x = [](const Vec&, const Vec&, double) {
    Mat cx(1, 3);
    cx << -0.5, -1.0, 0.0;
    return cx;
  };
  p.C_u = [](const Vec&, const Vec&, double) { return Mat::Zero(1, 1); };
  p.constraint_kinds = {ConstraintKind::pure_state};
  fill_structural_defaults(p);
  bp.ocp = p;

  SolverConfig cfg;
  cfg.gain_k = 0.1;
  cfg.k_tf = 0.05;
  cfg.k_C = 0.2;
  cfg.N = 101;
  cfg.rtol = 1e-3;
  cfg.atol = 1e-6;
  cfg.tau_end = 300.0;
  bp.cfg = cfg;

  // Physical motion along the straight line to (2, -1).
  InitSpec init;
  init.tf = 1.0;
  const double rt5 = std::sqrt(5.0);
  init.x = [rt5](double t) { return Vec{{2.0 * t * t, -t * t, 2.0 * rt5 * t}}; };
  init.u = [](double) { return Vec{{std::atan(2.0)}}; };
  bp.init = init;

  ReferenceValues ref;
  ref.tf = 0.8001;
  ref.arc_x_begin = 0.56;
  ref.arc_x_end = 1.06;
  bp.reference = ref;

  bp.validation_box.x_lo = Vec{{0.0, -1.5, 0.0}};
  bp.validation_box.x_hi = Vec{{2.0, 0.0, 5.0}};
  bp.validation_box.u_lo = Vec{{0.1}};
  bp.validation_box.u_hi = Vec{{1.4}};
  bp.validation_box.t_lo = 0.0;
  bp.validation_box.t_hi = 1.0;
  return bp;
}

const std::map<std::string, BuiltinProblem (*)()>& builtin_problems() {
  static const std::map<std::string, BuiltinProblem (*)()> registry = {
      {"example1", &example1},
      {"example2", &example2},
  };
  return registry;
}

}  // namespace vem
