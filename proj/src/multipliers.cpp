#include "vem/multipliers.hpp"

#include <algorithm>
#include <sstream>

namespace vem {

MultiplierState MultiplierState::zero(int r, int N) {
  MultiplierState s;
  s.mu = Mat::Zero(std::max(r, 0), N);
  s.active.assign(std::max(r, 0), {});
  s.pi_ref = Vec();
  return s;
}

Vec clipped_weights(const TimeGrid& grid, const std::vector<int>& active, int lo, int hi) {
  Vec w = Vec::Zero(grid.N);
  std::vector<bool> member(grid.N, false);
  for (int k : active) member[k] = true;
  for (int k = lo; k < hi; ++k) {
    if (member[k] && member[k + 1]) {
      const double half = 0.5 * grid.dt(k);
      w[k] += half;
      w[k + 1] += half;
    }
  }
  return w;
}

std::vector<std::vector<int>> detect_candidates(const OcpProblem& p, const Trajectory& traj,
                                                const SolverConfig& cfg) {
  const int N = traj.N();
  std::vector<std::vector<int>> cand(p.r);
  for (int i = 0; i < p.r; ++i) {
    const ConstraintKind kind = p.constraint_kinds[i];
    // Node 0 of a pure-state constraint cannot be steered (the initial state
    // is pinned), so it never enters the working set.
    const int first = (kind == ConstraintKind::pure_state) ? 1 : 0;
    if (kind == ConstraintKind::equality) {
      for (int k = first; k < N; ++k) cand[i].push_back(k);
      continue;
    }
    for (int k = first; k < N; ++k) {
      const double ci = p.C(traj.x.col(k), traj.u.col(k), traj.grid.t(k))[i];
      if (ci >= -cfg.active_tol) cand[i].push_back(k);
    }
  }
  return cand;
}

namespace {

/// Removes pure-state nodes with no active grid neighbor: they carry zero
/// quadrature measure, so their multiplier cannot influence the evolution and
/// their equation row is structurally zero.
void prune_zero_measure(const OcpProblem& p, std::vector<std::vector<int>>& active) {
  for (int i = 0; i < p.r; ++i) {
    if (p.constraint_kinds[i] != ConstraintKind::pure_state) continue;
    auto& list = active[i];
    std::vector<int> kept;
    for (size_t a = 0; a < list.size(); ++a) {
      const bool left = a > 0 && list[a - 1] == list[a] - 1;
      const bool right = a + 1 < list.size() && list[a + 1] == list[a] + 1;
      if (left || right) kept.push_back(list[a]);
    }
    list.swap(kept);
  }
}

}  // namespace

MuSystem assemble_mu_system(const OcpProblem& p, const Trajectory& traj,
                            const TransitionTable& table, const GradientBundle& bundle,
                            const std::vector<std::vector<int>>& active,
                            const SolverConfig& cfg) {
  const int N = traj.N();
  const int r = p.r;
  MuSystem sys;

  std::vector<std::vector<int>> col_of(r, std::vector<int>(N, -1));
  for (int j = 0; j < r; ++j) {
    for (int k : active[j]) {
      col_of[j][k] = static_cast<int>(sys.rows.size());
      sys.rows.emplace_back(j, k);
    }
  }
  const int dim = static_cast<int>(sys.rows.size());
  sys.A = Mat::Zero(dim, dim);
  sys.b = Vec::Zero(dim);
  if (dim == 0) return sys;

  std::vector<Vec> wclip_full(r), wclip_row;
  for (int j = 0; j < r; ++j) wclip_full[j] = clipped_weights(traj.grid, active[j], 0, N - 1);

  const int last = N - 1;
  for (int row = 0; row < dim; ++row) {
    const auto [i, a] = sys.rows[row];
    const Vec cx_i = bundle.cx_node[a].row(i).transpose();   // n
    const Vec cu_i = bundle.cu_node[a].row(i).transpose();   // m
    const Eigen::RowVectorXd cuK = cu_i.transpose() * bundle.K;
    const Eigen::RowVectorXd betaT =
        cx_i.transpose() * bundle.W[a] + cuK * bundle.fu_node[a].transpose();

    // alpha^T = [beta^T Phi^T(tf, a) g_xf^T] M^{-1}; M is symmetric.
    Vec alpha;
    if (bundle.has_terminal) {
      const Vec alpha_tilde =
          bundle.gxf * (table.phi(last, a) * betaT.transpose());
      alpha = bundle.M_lu.solve(alpha_tilde);
    }

    // Leading pointwise block at node a.
    for (int j = 0; j < r; ++j) {
      const int col = col_of[j][a];
      if (col < 0) continue;
      sys.A(row, col) += cuK.dot(bundle.cu_node[a].row(j));
    }

    for (int j = 0; j < r; ++j) {
      const Vec wl = clipped_weights(traj.grid, active[j], 0, a);
      const Vec wr = clipped_weights(traj.grid, active[j], a, N - 1);
      const Vec& wf = wclip_full[j];
      for (int k : active[j]) {
        const int col = col_of[j][k];
        double coef = 0.0;
        if (bundle.has_terminal && wf[k] != 0.0) {
          coef -= wf[k] * alpha.dot(bundle.h2[k].col(j));
        }
        if (k <= a && wl[k] != 0.0) {
          const Eigen::RowVectorXd lead = cx_i.transpose() * table.phi(a, k);
          const Vec kern = bundle.W[k] * bundle.cx_node[k].row(j).transpose() +
                           bundle.fu_node[k] * (bundle.K * bundle.cu_node[k].row(j).transpose());
          coef += wl[k] * lead.dot(kern);
        }
        if (k >= a && wr[k] != 0.0) {
          const Vec prop = table.phi(k, a) * betaT.transpose();
          coef += wr[k] * prop.dot(bundle.cx_node[k].row(j));
        }
        if (coef != 0.0) sys.A(row, col) += coef;
      }
    }

    double dA = cx_i.dot(bundle.v[a]) + cuK.dot(bundle.pu.col(a));
    if (bundle.has_terminal) dA -= alpha.dot(bundle.h1);
    dA -= cfg.k_C * bundle.c_node[a][i];
    sys.b[row] = -dA;
  }

  if (cfg.tikhonov > 0.0) {
    sys.A.diagonal().array() += cfg.tikhonov;
  }
  return sys;
}

MultiplierState solve_mu(const OcpProblem& p, const Trajectory& traj,
                         const TransitionTable& table, const GradientBundle& bundle,
                         const SolverConfig& cfg) {
  const int N = traj.N();
  MultiplierState state = MultiplierState::zero(p.r, N);
  if (p.r == 0) return state;

  std::vector<std::vector<int>> active = detect_candidates(p, traj, cfg);
  prune_zero_measure(p, active);

  const int max_iters = std::max(1, p.r * N);
  for (int iter = 0; iter < max_iters; ++iter) {
    MuSystem sys = assemble_mu_system(p, traj, table, bundle, active, cfg);
    const int dim = static_cast<int>(sys.rows.size());
    if (dim == 0) {
      state.active = active;
      state.iterations = iter;
      return state;
    }
    state.iterations = iter + 1;
    if (!sys.A.allFinite() || !sys.b.allFinite()) {
      throw AssemblyError("non-finite entry in the multiplier system");
    }
    // At full saturation the (mu, pi) split of the system is not unique (the
    // induced control rate is), so the matrix can be consistently
    // rank-deficient. A complete orthogonal decomposition keeps the solution
    // bounded there; a genuinely unsolvable system shows up as a large
    // residual and is reported.
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(sys.A);
    const Vec mu_vec = cod.solve(sys.b);
    const double scale =
        sys.A.cwiseAbs().maxCoeff() * std::max(1.0, mu_vec.cwiseAbs().maxCoeff()) +
        sys.b.cwiseAbs().maxCoeff();
    const double residual = (sys.A * mu_vec - sys.b).cwiseAbs().maxCoeff();
    if (!mu_vec.allFinite() || residual > 1e-6 * std::max(scale, 1e-12)) {
      std::ostringstream os;
      os << "multiplier system singular or inconsistent (residual " << residual << ", rank "
         << cod.rank() << " of " << dim << "; active-set sizes:";
      for (const auto& lst : active) os << " " << lst.size();
      os << ")";
      throw MultiplierSolveError(os.str());
    }

    bool removed = false;
    std::vector<std::vector<int>> next = active;
    for (int idx = 0; idx < dim; ++idx) {
      const auto [j, k] = sys.rows[idx];
      if (p.constraint_kinds[j] == ConstraintKind::equality) continue;
      if (mu_vec[idx] < -cfg.sign_tol) {
        auto& lst = next[j];
        lst.erase(std::remove(lst.begin(), lst.end(), k), lst.end());
        removed = true;
      }
    }
    if (!removed) {
      state.mu.setZero();
      for (int idx = 0; idx < dim; ++idx) {
        const auto [j, k] = sys.rows[idx];
        state.mu(j, k) = mu_vec[idx];
      }
      state.active = active;
      return state;
    }
    prune_zero_measure(p, next);
    active.swap(next);
  }
  throw ActiveSetError("active-set iteration did not settle within r*N sweeps");
}

}  // namespace vem
