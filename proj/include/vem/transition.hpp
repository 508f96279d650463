#pragma once

#include <vector>

#include "vem/problem.hpp"
#include "vem/trajectory.hpp"

namespace vem {

/// State-transition matrices Phi(t_i, t_j) of the dynamics linearized along a
/// trajectory, together with the impulse responses
/// Ho(t_i, t_j) = Phi(t_i, t_j) f_u(t_j), stored for all i >= j. Lookups with
/// i < j return zero for Ho (a control impulse cannot act backwards in time).
class TransitionTable {
 public:
  TransitionTable(int N, int n, int m);

  const Mat& phi(int i, int j) const;  // requires i >= j
  const Mat& ho(int i, int j) const;   // requires i >= j
  Mat ho_or_zero(int i, int j) const;  // zero matrix when i < j

  int N() const { return N_; }
  int n() const { return n_; }
  int m() const { return m_; }

  Mat& phi_mut(int i, int j);
  Mat& ho_mut(int i, int j);

 private:
  int index(int i, int j) const { return i * (i + 1) / 2 + j; }
  int N_, n_, m_;
  std::vector<Mat> phi_;
  std::vector<Mat> ho_;
};

/// Builds the table for the current trajectory. Per-interval factors
/// Phi(t_{i+1}, t_i) are integrated with four fixed RK4 substeps of
/// dPhi/dt = f_x(t) Phi, then chained into the full lower-triangular table.
TransitionTable build_transition_table(const OcpProblem& p, const Trajectory& traj);

}  // namespace vem
