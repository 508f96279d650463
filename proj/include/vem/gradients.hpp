#pragma once

#include <vector>

#include "vem/problem.hpp"
#include "vem/trajectory.hpp"
#include "vem/transition.hpp"

namespace vem {

struct MultiplierState;  // multipliers.hpp

/// Gains and tolerances of one evolution run.
struct SolverConfig {
  double gain_k = 1.0;  ///< K = gain_k * I unless K_override is set
  Mat K_override;       ///< optional full m x m positive-definite gain
  double k_tf = 0.0;    ///< terminal-time gain; forced to 0 for fixed tf
  double k_C = 0.1;     ///< soft-barrier gain on path constraints
  double k_g = 0.0;     ///< soft-barrier gain on the terminal constraint

  double rtol = 1e-3;
  double atol = 1e-6;
  double tau_end = 300.0;
  int N = 41;

  double active_tol = 1e-9;     ///< activation threshold on C
  double sign_tol = 1e-10;      ///< negativity threshold for dropping multipliers
  double residual_tol = 1e-7;   ///< optimality-residual convergence threshold
  int repropagate_every = 10;   ///< accepted steps between restorations; <= 0 disables
  double tikhonov = 0.0;        ///< optional regularization of the mu system
  bool node_motion_correction = true;  ///< transport x-node values as tf moves

  double feas_dyn_tol = 1e-6;
  double feas_g_tol = 1e-6;
  unsigned seed = 0;

  Mat gain_matrix(int m) const;
};

/// Everything the evolution right-hand side derives from one trajectory:
/// the costate-free gradient pu, the terminal-multiplier system (M, h1, h2),
/// and the running kernel tables that every mu/pi/costate formula reuses.
///
/// h2 is stored premultiplied by g_xf (one q x r block per node).
struct GradientBundle {
  Mat pu;               // m x N
  Mat M;                // q x q
  Vec h1;               // q
  std::vector<Mat> h2;  // per node, q x r
  Vec r_vec;            // q, filled by solve_pi
  Vec pi;               // q, filled by solve_pi
  Mat pu_pc;            // m x N, filled by compute_pu_pc

  // Kernel tables (trapezoid-consistent with the grid):
  //   W[k]   = int_{t0}^{t_k} Ho(t_k,s) K Ho^T(t_k,s) ds            (n x n)
  //   v[k]   = int_{t0}^{t_k} Ho(t_k,s) K pu(s) ds                  (n)
  //   z.col(k) = int_{t_k}^{tf} Phi^T(s,t_k) w(s) ds, the smooth
  //              costate-like integrand w = L_x + phi_tx + phi_xx^T f
  //              + f_x^T phi_x                                       (n)
  std::vector<Mat> W;
  std::vector<Vec> v;
  Mat z;

  Eigen::PartialPivLU<Mat> M_lu;
  bool has_terminal = false;  // q >= 1

  // Cached per-node evaluations.
  std::vector<Vec> f_node;   // n
  std::vector<Mat> fu_node;  // n x m
  std::vector<Mat> cx_node;  // r x n
  std::vector<Mat> cu_node;  // r x m
  std::vector<Vec> c_node;   // r
  Mat K;                     // effective gain
  double k_tf_eff = 0.0;
  Mat gxf;                   // q x n at the terminal node
  Vec gtf;                   // q
  Vec g_val;                 // q
  double lagrange_rate_tf = 0.0;  // (phi_t + phi_x^T f + L) at tf
  Vec terminal_dir;               // q, g_xf f + g_tf at tf
};

/// Costate-free gradient of the cost functional with respect to the control
/// field, Eq.-(30)-style, assembled with trapezoid quadrature. Also builds the
/// kernel tables and, when q >= 1, the terminal system M, h1, h2 with its LU
/// factorization. Throws ControllabilityError when M is numerically singular.
GradientBundle build_gradient_bundle(const OcpProblem& p, const Trajectory& traj,
                                     const TransitionTable& table, const SolverConfig& cfg);

/// Solves M pi = -(g_xf \int h2 mu dt + h1 - k_g g) for the terminal
/// multiplier. Stores r_vec and pi in the bundle and returns pi. For q = 0
/// returns an empty vector.
Vec solve_pi(const OcpProblem& p, const Trajectory& traj, const TransitionTable& table,
             GradientBundle& bundle, const MultiplierState& mu, const SolverConfig& cfg);

/// Constrained gradient pu_pc = pu + Ho^T(tf,t) g_xf^T pi + C_u^T mu(t)
/// + \int_t^{tf} Ho^T(s,t) C_x^T(s) mu(s) ds. Stores and returns it.
const Mat& compute_pu_pc(const OcpProblem& p, const Trajectory& traj,
                         const TransitionTable& table, GradientBundle& bundle,
                         const MultiplierState& mu, const Vec& pi);

/// Analytic costate recovery: lambda(t) = phi_x + Phi^T(tf,t) g_xf^T pi
/// + \int_t^{tf} Phi^T(s,t) (L_x + C_x^T mu + phi_tx + phi_xx^T f
/// + f_x^T phi_x) ds. Returns one n-column per node.
Mat recover_costate(const OcpProblem& p, const Trajectory& traj, const TransitionTable& table,
                    const GradientBundle& bundle, const MultiplierState& mu, const Vec& pi);

}  // namespace vem
