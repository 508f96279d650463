#include "vem/gradients.hpp"

#include <sstream>

#include "vem/multipliers.hpp"

namespace vem {

Mat SolverConfig::gain_matrix(int m) const {
  if (K_override.size() > 0) {
    if (K_override.rows() != m || K_override.cols() != m) {
      throw AssemblyError("gain matrix override has the wrong dimension");
    }
    if ((K_override - K_override.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, K_override.cwiseAbs().maxCoeff())) {
      throw AssemblyError("gain matrix override must be symmetric");
    }
    Eigen::LLT<Mat> llt(K_override);
    if (llt.info() != Eigen::Success) {
      throw AssemblyError("gain matrix override must be positive definite");
    }
    return K_override;
  }
  if (!(gain_k > 0.0)) throw AssemblyError("gain_k must be positive");
  return gain_k * Mat::Identity(m, m);
}

GradientBundle build_gradient_bundle(const OcpProblem& p, const Trajectory& traj,
                                     const TransitionTable& table, const SolverConfig& cfg) {
  const int N = traj.N();
  const int n = p.n, m = p.m, q = p.q, r = p.r;
  GradientBundle b;
  b.K = cfg.gain_matrix(m);
  b.k_tf_eff = p.has_free_tf() ? cfg.k_tf : 0.0;
  b.has_terminal = q > 0;

  b.f_node.resize(N);
  b.fu_node.resize(N);
  b.cx_node.resize(N);
  b.cu_node.resize(N);
  b.c_node.resize(N);
  Mat w_integrand(n, N);  // L_x + phi_tx + phi_xx^T f + f_x^T phi_x along the trajectory
  Mat lu_node(m, N);
  Mat phix_node(n, N);
  for (int k = 0; k < N; ++k) {
    const Vec xk = traj.x.col(k);
    const Vec uk = traj.u.col(k);
    const double tk = traj.grid.t(k);
    b.f_node[k] = p.f(xk, uk, tk);
    b.fu_node[k] = p.f_u(xk, uk, tk);
    if (r > 0) {
      b.cx_node[k] = p.C_x(xk, uk, tk);
      b.cu_node[k] = p.C_u(xk, uk, tk);
      b.c_node[k] = p.C(xk, uk, tk);
    } else {
      b.cx_node[k] = Mat(0, n);
      b.cu_node[k] = Mat(0, m);
      b.c_node[k] = Vec();
    }
    lu_node.col(k) = p.L_u(xk, uk, tk);
    phix_node.col(k) = p.phi_x(xk, tk);
    w_integrand.col(k) = p.L_x(xk, uk, tk) + p.phi_tx(xk, tk) +
                         p.phi_xx(xk, tk).transpose() * b.f_node[k] +
                         p.f_x(xk, uk, tk).transpose() * phix_node.col(k);
    if (!b.f_node[k].allFinite() || !w_integrand.col(k).allFinite()) {
      std::ostringstream os;
      os << "non-finite callback value at node " << k << " while assembling gradients";
      throw AssemblyError(os.str());
    }
  }

  // Backward accumulation of z(i) = int_{t_i}^{tf} Phi^T(s, t_i) w(s) ds.
  b.z = Mat::Zero(n, N);
  for (int i = N - 2; i >= 0; --i) {
    const double half = 0.5 * traj.grid.dt(i);
    b.z.col(i) = half * w_integrand.col(i) +
                 table.phi(i + 1, i).transpose() *
                     (b.z.col(i + 1) + half * w_integrand.col(i + 1));
  }

  b.pu.resize(m, N);
  for (int k = 0; k < N; ++k) {
    b.pu.col(k) = lu_node.col(k) + b.fu_node[k].transpose() * phix_node.col(k) +
                  b.fu_node[k].transpose() * b.z.col(k);
  }

  // Forward Gramian-type tables.
  b.W.assign(N, Mat::Zero(n, n));
  b.v.assign(N, Vec::Zero(n));
  std::vector<Mat> F(N);
  for (int k = 0; k < N; ++k) F[k] = b.fu_node[k] * b.K * b.fu_node[k].transpose();
  for (int c = 0; c + 1 < N; ++c) {
    const double half = 0.5 * traj.grid.dt(c);
    const Mat& step = table.phi(c + 1, c);
    b.W[c + 1] = step * (b.W[c] + half * F[c]) * step.transpose() + half * F[c + 1];
    b.v[c + 1] = step * (b.v[c] + half * b.fu_node[c] * (b.K * b.pu.col(c))) +
                 half * b.fu_node[c + 1] * (b.K * b.pu.col(c + 1));
  }

  // Terminal quantities.
  const Vec xf = traj.x.col(N - 1);
  const double tf = traj.grid.tf;
  b.lagrange_rate_tf = p.phi_t(xf, tf) + phix_node.col(N - 1).dot(b.f_node[N - 1]) +
                       p.L(xf, traj.u.col(N - 1), tf);
  if (q > 0) {
    b.gxf = p.g_xf(xf, tf);
    b.gtf = p.g_tf(xf, tf);
    b.g_val = p.g(xf, tf);
    b.terminal_dir = b.gxf * b.f_node[N - 1] + b.gtf;

    b.M = b.gxf * b.W[N - 1] * b.gxf.transpose();
    if (b.k_tf_eff > 0.0) {
      b.M += b.k_tf_eff * b.terminal_dir * b.terminal_dir.transpose();
    }
    b.h1 = b.gxf * b.v[N - 1];
    if (b.k_tf_eff > 0.0) {
      b.h1 += b.k_tf_eff * b.terminal_dir * b.lagrange_rate_tf;
    }
    b.h2.resize(N);
    for (int k = 0; k < N; ++k) {
      if (r > 0) {
        b.h2[k] = b.gxf * (table.phi(N - 1, k) *
                           (b.W[k] * b.cx_node[k].transpose() +
                            b.fu_node[k] * b.K * b.cu_node[k].transpose()));
      } else {
        b.h2[k] = Mat(q, 0);
      }
    }
    b.M_lu.compute(b.M);
    const double rc = b.M_lu.rcond();
    if (!(rc > 1e-12)) {
      std::ostringstream os;
      os << "terminal multiplier system is numerically singular (rcond " << rc
         << "); the controllability assumption appears violated";
      throw ControllabilityError(os.str());
    }
  } else {
    b.terminal_dir = Vec();
    b.g_val = Vec();
  }
  return b;
}

Vec solve_pi(const OcpProblem& p, const Trajectory& traj, const TransitionTable& /*table*/,
             GradientBundle& bundle, const MultiplierState& mu, const SolverConfig& cfg) {
  if (p.q == 0) {
    bundle.r_vec = Vec();
    bundle.pi = Vec();
    return bundle.pi;
  }
  Vec r = bundle.h1;
  for (int j = 0; j < p.r; ++j) {
    const Vec w = clipped_weights(traj.grid, mu.active[j], 0, traj.N() - 1);
    for (int k : mu.active[j]) {
      if (w[k] != 0.0) r += w[k] * mu.mu(j, k) * bundle.h2[k].col(j);
    }
  }
  if (cfg.k_g > 0.0) r -= cfg.k_g * bundle.g_val;
  bundle.r_vec = r;
  bundle.pi = -bundle.M_lu.solve(r);
  return bundle.pi;
}

namespace {

/// Backward kernel zmu(i) = int_{t_i}^{tf} Phi^T(s, t_i) C_x^T(s) mu(s) ds
/// with per-constraint clipped quadrature.
Mat backward_mu_kernel(const OcpProblem& p, const Trajectory& traj, const TransitionTable& table,
                       const GradientBundle& bundle, const MultiplierState& mu) {
  const int N = traj.N();
  Mat zmu = Mat::Zero(p.n, N);
  if (p.r == 0) return zmu;
  std::vector<std::vector<bool>> is_active(p.r, std::vector<bool>(N, false));
  for (int j = 0; j < p.r; ++j) {
    for (int k : mu.active[j]) is_active[j][k] = true;
  }
  for (int i = N - 2; i >= 0; --i) {
    const double half = 0.5 * traj.grid.dt(i);
    Vec head = Vec::Zero(p.n);
    Vec carry = zmu.col(i + 1);
    for (int j = 0; j < p.r; ++j) {
      if (is_active[j][i] && is_active[j][i + 1]) {
        head += half * mu.mu(j, i) * bundle.cx_node[i].row(j).transpose();
        carry += half * mu.mu(j, i + 1) * bundle.cx_node[i + 1].row(j).transpose();
      }
    }
    zmu.col(i) = head + table.phi(i + 1, i).transpose() * carry;
  }
  return zmu;
}

}  // namespace

const Mat& compute_pu_pc(const OcpProblem& p, const Trajectory& traj,
                         const TransitionTable& table, GradientBundle& bundle,
                         const MultiplierState& mu, const Vec& pi) {
  const int N = traj.N();
  bundle.pu_pc = bundle.pu;
  const Mat zmu = backward_mu_kernel(p, traj, table, bundle, mu);
  for (int k = 0; k < N; ++k) {
    if (p.q > 0) {
      bundle.pu_pc.col(k) += bundle.fu_node[k].transpose() *
                             (table.phi(N - 1, k).transpose() * (bundle.gxf.transpose() * pi));
    }
    if (p.r > 0) {
      bundle.pu_pc.col(k) += bundle.cu_node[k].transpose() * mu.mu.col(k);
      bundle.pu_pc.col(k) += bundle.fu_node[k].transpose() * zmu.col(k);
    }
  }
  return bundle.pu_pc;
}

Mat recover_costate(const OcpProblem& p, const Trajectory& traj, const TransitionTable& table,
                    const GradientBundle& bundle, const MultiplierState& mu, const Vec& pi) {
  const int N = traj.N();
  Mat lambda(p.n, N);
  const Mat zmu = backward_mu_kernel(p, traj, table, bundle, mu);
  for (int k = 0; k < N; ++k) {
    lambda.col(k) = p.phi_x(traj.x.col(k), traj.grid.t(k)) + bundle.z.col(k) + zmu.col(k);
    if (p.q > 0) {
      lambda.col(k) +=
          table.phi(N - 1, k).transpose() * (bundle.gxf.transpose() * pi);
    }
  }
  return lambda;
}

}  // namespace vem
