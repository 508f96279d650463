#pragma once

#include <utility>
#include <vector>

#include "vem/gradients.hpp"

namespace vem {

/// KKT multiplier grid. mu(i, k) is the multiplier of path constraint i at
/// node k; it is zero whenever k is not in that constraint's active list.
/// Accepted inequality multipliers are nonnegative up to sign_tol; equality
/// constraints carry no sign restriction.
struct MultiplierState {
  Mat mu;                                 // r x N
  std::vector<std::vector<int>> active;   // per-constraint sorted node indices
  Vec pi_ref;                             // pi consistent with this mu
  int iterations = 0;                     // working-set sweeps used

  static MultiplierState zero(int r, int N);
};

/// Candidate active nodes: for inequality constraints the nodes with
/// C_i >= -active_tol, for equality constraints every node. Pure-state rows
/// at node 0 are excluded (the initial state is pinned, so no variation can
/// act on them).
std::vector<std::vector<int>> detect_candidates(const OcpProblem& p, const Trajectory& traj,
                                                const SolverConfig& cfg);

/// One equation per (constraint, active node) pair. rows[k] identifies the
/// pair behind row k of A; the unknown ordering equals the row ordering.
struct MuSystem {
  Mat A;
  Vec b;  // right-hand side, A mu_vec = b
  std::vector<std::pair<int, int>> rows;
};

/// Discretizes the multiplier integral equation on the given active sets.
/// Quadratures over mu-weighted kernels run over fully active grid intervals
/// only (trapezoid weights clipped at active-arc boundaries); isolated
/// pure-state nodes consequently carry zero measure and are dropped by
/// solve_mu before assembly.
MuSystem assemble_mu_system(const OcpProblem& p, const Trajectory& traj,
                            const TransitionTable& table, const GradientBundle& bundle,
                            const std::vector<std::vector<int>>& active,
                            const SolverConfig& cfg);

/// Working-set iteration: detect candidates, solve the assembled system, drop
/// inequality nodes with mu < -sign_tol, repeat until the sign rule holds.
MultiplierState solve_mu(const OcpProblem& p, const Trajectory& traj,
                         const TransitionTable& table, const GradientBundle& bundle,
                         const SolverConfig& cfg);

/// Per-node quadrature weights over [lo, hi] restricted to the active set:
/// a grid interval contributes trapezoid halves only when both endpoints are
/// active for the constraint.
Vec clipped_weights(const TimeGrid& grid, const std::vector<int>& active, int lo, int hi);

}  // namespace vem
