#pragma once

#include <functional>
#include <optional>

#include "vem/evolution.hpp"

namespace vem {

/// Closed-form initializer: x(t), u(t) and the initial terminal-time guess.
struct InitSpec {
  std::function<Vec(double)> x;
  std::function<Vec(double)> u;
  double tf = 0.0;
};

/// Samples the closed forms on a uniform grid and validates them by
/// re-propagation (dynamics residual <= feas_dyn_tol scale) and against the
/// path/terminal constraints. Throws InfeasibleInitError on rejection.
Trajectory straight_line_init(const OcpProblem& p, const InitSpec& spec,
                              const SolverConfig& cfg);

/// Options of the feasible-solution search.
struct FssopOptions {
  double tf_guess = 1.0;
  Vec weights;                  ///< per-constraint w_i > 0; default all ones
  double smoothing_eps = 1e-6;  ///< 0.5*eps*||u||^2 term for pure-state problems
  double k_g = 0.5;             ///< terminal-constraint decay gain of the search run
  double tau_end = 400.0;       ///< search horizon in variation time
  /// Optional running-cost override (value and derivatives); replaces the
  /// default sum of weighted constraint values.
  std::function<double(const Vec&, const Vec&, double)> cost_L;
  std::function<Vec(const Vec&, const Vec&, double)> cost_L_x;
  std::function<Vec(const Vec&, const Vec&, double)> cost_L_u;
};

/// Builds a feasible initializer for Problem-1 runs by evolving a derived
/// problem (fixed tf, running cost sum w_i C_i or the override, no path
/// constraints) from a zero-control propagated start until the trajectory
/// satisfies C <= active_tol and ||g|| within the feasibility gate. The
/// terminal constraint is pulled in through the soft-barrier gain k_g.
Trajectory solve_fssop(const OcpProblem& p, const FssopOptions& opts, const SolverConfig& cfg);

}  // namespace vem
