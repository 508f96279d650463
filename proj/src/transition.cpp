#include "vem/transition.hpp"

#include <sstream>

namespace vem {

TransitionTable::TransitionTable(int N, int n, int m)
    : N_(N), n_(n), m_(m), phi_(N * (N + 1) / 2), ho_(N * (N + 1) / 2) {}

const Mat& TransitionTable::phi(int i, int j) const { return phi_[index(i, j)]; }

const Mat& TransitionTable::ho(int i, int j) const { return ho_[index(i, j)]; }

Mat TransitionTable::ho_or_zero(int i, int j) const {
  if (i < j) return Mat::Zero(n_, m_);
  return ho_[index(i, j)];
}

Mat& TransitionTable::phi_mut(int i, int j) { return phi_[index(i, j)]; }
Mat& TransitionTable::ho_mut(int i, int j) { return ho_[index(i, j)]; }

TransitionTable build_transition_table(const OcpProblem& p, const Trajectory& traj) {
  const int N = traj.N();
  const int n = p.n;
  TransitionTable table(N, n, p.m);

  // Per-interval factors Phi(t_{i+1}, t_i): RK4 on dPhi/dt = f_x(t) Phi with
  // x and u linearly interpolated inside the interval.
  std::vector<Mat> factor(N - 1);
  for (int i = 0; i + 1 < N; ++i) {
    const double ta = traj.grid.t(i);
    const double h = traj.grid.dt(i) / 4.0;
    const Vec xa = traj.x.col(i), xb = traj.x.col(i + 1);
    const Vec ua = traj.u.col(i), ub = traj.u.col(i + 1);
    const double span = traj.grid.dt(i);
    auto fx_at = [&](double t) -> Mat {
      const double theta = span > 0 ? (t - ta) / span : 0.0;
      const Vec x = xa + theta * (xb - xa);
      const Vec u = ua + theta * (ub - ua);
      Mat A = p.f_x(x, u, t);
      if (!A.allFinite()) {
        std::ostringstream os;
        os << "non-finite f_x while building transition factors near node " << i;
        throw AssemblyError(os.str());
      }
      return A;
    };
    Mat Phi = Mat::Identity(n, n);
    for (int s = 0; s < 4; ++s) {
      const double t = ta + s * h;
      const Mat k1 = fx_at(t) * Phi;
      const Mat k2 = fx_at(t + 0.5 * h) * (Phi + 0.5 * h * k1);
      const Mat k3 = fx_at(t + 0.5 * h) * (Phi + 0.5 * h * k2);
      const Mat k4 = fx_at(t + h) * (Phi + h * k3);
      Phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    factor[i] = std::move(Phi);
  }

  std::vector<Mat> fu(N);
  for (int j = 0; j < N; ++j) {
    fu[j] = p.f_u(traj.x.col(j), traj.u.col(j), traj.grid.t(j));
    if (!fu[j].allFinite()) {
      std::ostringstream os;
      os << "non-finite f_u at node " << j;
      throw AssemblyError(os.str());
    }
  }

  // Chain row by row: Phi(i, j) = Phi(i, i-1) * Phi(i-1, j).
  const Mat eye = Mat::Identity(n, n);
  table.phi_mut(0, 0) = eye;
  for (int i = 1; i < N; ++i) {
    table.phi_mut(i, i) = eye;
    table.phi_mut(i, i - 1) = factor[i - 1];
    for (int j = i - 2; j >= 0; --j) {
      table.phi_mut(i, j) = factor[i - 1] * table.phi(i - 1, j);
    }
  }
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j <= i; ++j) {
      table.ho_mut(i, j) = table.phi(i, j) * fu[j];
    }
  }
  return table;
}

}  // namespace vem
