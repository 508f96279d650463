#pragma once

#include "vem/evolution.hpp"

namespace vem {

/// Costate-free first-order optimality residuals: the sup-norm of the
/// constrained gradient over all nodes and the absolute terminal
/// transversality defect (0 by convention for fixed tf).
struct OptimalityResiduals {
  double pu_pc_inf = 0.0;
  double transversality = 0.0;
};

OptimalityResiduals optimality_residuals(const OcpProblem& p, const Trajectory& traj,
                                         const TransitionTable& table, GradientBundle& bundle,
                                         const MultiplierState& mu, const Vec& pi,
                                         const SolverConfig& cfg);

/// Convenience: rebuilds table/bundle/multipliers at the trajectory and
/// returns all optimality data at once.
struct StateEvaluation {
  MultiplierState mu;
  Vec pi;
  Mat lambda;  // n x N recovered costates
  OptimalityResiduals residuals;
};
StateEvaluation evaluate_state(const OcpProblem& p, const Trajectory& traj,
                               const SolverConfig& cfg);

/// Residuals of the classic adjoined optimality system evaluated with the
/// recovered costates: the adjoint ODE (central differences on lambda), the
/// Hamiltonian control stationarity, both transversality conditions, and the
/// complementarity defect max |mu_i C_i|.
struct ClassicResiduals {
  double adjoint_ode = 0.0;
  double hamiltonian_u = 0.0;
  double transversality_time = 0.0;
  double transversality_state = 0.0;
  double complementarity = 0.0;
};

ClassicResiduals classic_residuals(const OcpProblem& p, const Trajectory& traj,
                                   const Mat& lambda, const Vec& pi, const MultiplierState& mu,
                                   const SolverConfig& cfg);

/// Independent gradient oracle for unconstrained fixed-tf problems: compares
/// the inner product of pu with 5 random bump directions against forward
/// differences of the propagated cost (epsilon = 1e-5). Returns the worst
/// relative error.
double fd_gradient_check(const OcpProblem& p, const Trajectory& traj, const SolverConfig& cfg);

/// Residuals of the identities the multiplier solves enforce: the assembled
/// multiplier system rows |dC_i/dtau + k_C C_i| and the terminal-rate system
/// ||M pi + r||, both scaled by the magnitudes of their assembled terms.
struct ConstraintRateResiduals {
  double c_rate_rel = 0.0;
  double g_rate_rel = 0.0;
  int active_rows = 0;
};

ConstraintRateResiduals constraint_rate_residuals(const OcpProblem& p, const Trajectory& traj,
                                                  const SolverConfig& cfg);

}  // namespace vem
