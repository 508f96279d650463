#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vem/multipliers.hpp"

namespace vem {

/// One record per accepted step of the variation-time integration.
struct DiagnosticsRecord {
  double tau = 0.0;
  double J = 0.0;
  double tf = 0.0;
  double g_norm = 0.0;           // ||g(x(tf), tf)||_2
  double max_c_violation = 0.0;  // max_i max_t C_i^+
  double pu_pc_inf = 0.0;        // sup-norm of the constrained gradient
  double transversality = 0.0;   // |Eq.-(52) residual|, 0 for fixed tf
};

struct Diagnostics {
  std::vector<DiagnosticsRecord> records;
  long rhs_evals = 0;
  long accepted_steps = 0;
  long rejected_steps = 0;
  bool converged = false;  // residual-based termination (vs tau_end reached)
};

struct EvolutionRates {
  Mat dx;       // n x N, column 0 identically zero
  Mat du;       // m x N
  double dtf = 0.0;
};

/// Full right-hand-side evaluation: rates plus the multiplier solves and the
/// scalar diagnostics that fall out of them.
struct RhsEval {
  EvolutionRates rates;
  MultiplierState mu;
  Vec pi;
  double pu_pc_inf = 0.0;
  double transversality = 0.0;
  double J = 0.0;
  double g_norm = 0.0;
  double max_c_violation = 0.0;
};

/// Assembles the evolution equations at the current trajectory:
///   du/dtau  = -K pu_pc
///   dtf/dtau = -k_tf (phi_t + phi_x^T f + L + pi^T (g_xf f + g_tf))|_tf
///   dx/dtau  = \int_{t0}^{t} Ho(t,s) du/dtau(s) ds  (+ node-motion transport
///              f s_i dtf/dtau, since grid nodes move with tf)
RhsEval evolution_rhs(const OcpProblem& p, const Trajectory& traj, const SolverConfig& cfg);

/// Recomputes the states by forward RK4 integration (4 substeps per interval,
/// control linearly interpolated) of xdot = f from x0.
Trajectory propagate_states(const OcpProblem& p, const Trajectory& traj);

/// Scalar cost phi(x(tf), tf) + trapezoid of L along the trajectory.
double evaluate_cost(const OcpProblem& p, const Trajectory& traj);

/// Max over nodes and components of C_i^+ (positive part).
double max_constraint_violation(const OcpProblem& p, const Trajectory& traj);

/// ||g(x(tf), tf)||_2; zero when q = 0.
double terminal_residual_norm(const OcpProblem& p, const Trajectory& traj);

/// Size of the stacked variation-time IVP: x at all N nodes (node 0 frozen),
/// u at all N nodes, and the terminal time.
int stacked_dimension(const OcpProblem& p, int N);

struct SolveResult {
  Trajectory traj;
  MultiplierState mu;
  Vec pi;
  Diagnostics diag;
};

struct SolveHooks {
  /// Called after every accepted step (and once for the initial state).
  std::function<void(double tau, const Trajectory&, const RhsEval&)> observer;
  /// Extra termination test, checked after every accepted step.
  std::function<bool(double tau, const Trajectory&)> stop_predicate;
  /// Skips the feasibility gate on the initial trajectory (used by the
  /// feasible-solution search, which starts infeasible by design).
  bool skip_feasibility_gate = false;
};

/// Integrates the stacked IVP with adaptive Dormand-Prince 4(5) until the
/// costate-free optimality residuals drop below residual_tol or tau reaches
/// tau_end. Periodically re-propagates the states to purge linearization
/// drift. Throws InfeasibleInitError when the initial trajectory fails the
/// feasibility gate and RhsError/StiffnessError on integration failures.
SolveResult solve(const OcpProblem& p, const Trajectory& init, const SolverConfig& cfg,
                  const SolveHooks& hooks = {});

/// Thrown on step-size underflow; carries the diagnostics collected so far.
class StiffnessError : public VemError {
 public:
  StiffnessError(const std::string& what, Diagnostics diag)
      : VemError(what), diagnostics(std::move(diag)) {}
  Diagnostics diagnostics;
};

}  // namespace vem
