#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vem/common.hpp"

namespace vem {

enum class ConstraintKind { mixed, pure_state, pure_control, equality };

enum class TerminalTimeMode { free_tf, fixed_tf };

/// Continuous-time optimal control problem in Bolza form:
///
///   min  phi(x(tf), tf) + \int_{t0}^{tf} L(x, u, t) dt
///   s.t. xdot = f(x, u, t),  x(t0) = x0,
///        g(x(tf), tf) = 0,   C(x, u, t) <= 0 componentwise.
///
/// All callbacks must be pure: the solver evaluates them in arbitrary order
/// and may share one problem across threads.
struct OcpProblem {
  int n = 0;  ///< state dimension
  int m = 0;  ///< control dimension
  int q = 0;  ///< terminal constraint dimension
  int r = 0;  ///< path constraint dimension

  std::function<Vec(const Vec&, const Vec&, double)> f;    // n
  std::function<Mat(const Vec&, const Vec&, double)> f_x;  // n x n
  std::function<Mat(const Vec&, const Vec&, double)> f_u;  // n x m

  std::function<double(const Vec&, const Vec&, double)> L;  // scalar
  std::function<Vec(const Vec&, const Vec&, double)> L_x;   // n
  std::function<Vec(const Vec&, const Vec&, double)> L_u;   // m

  std::function<double(const Vec&, double)> phi;    // scalar
  std::function<Vec(const Vec&, double)> phi_x;     // n
  std::function<double(const Vec&, double)> phi_t;  // scalar
  std::function<Mat(const Vec&, double)> phi_xx;    // n x n
  std::function<Vec(const Vec&, double)> phi_tx;    // n

  std::function<Vec(const Vec&, double)> g;     // q
  std::function<Mat(const Vec&, double)> g_xf;  // q x n
  std::function<Vec(const Vec&, double)> g_tf;  // q

  std::function<Vec(const Vec&, const Vec&, double)> C;    // r
  std::function<Mat(const Vec&, const Vec&, double)> C_x;  // r x n
  std::function<Mat(const Vec&, const Vec&, double)> C_u;  // r x m

  std::vector<ConstraintKind> constraint_kinds;  // one entry per C component

  double t0 = 0.0;
  Vec x0;
  TerminalTimeMode tf_mode = TerminalTimeMode::free_tf;
  double fixed_tf_value = 0.0;

  bool has_free_tf() const { return tf_mode == TerminalTimeMode::free_tf; }
};

/// Fills absent cost/constraint callbacks with structural zeros: a null L is
/// the zero running cost, a null phi the zero terminal cost, and for q = 0 or
/// r = 0 the corresponding constraint callbacks become empty-valued. Callbacks
/// that are present stay untouched; missing *derivatives* of present callbacks
/// are not filled here (see apply_fd_fallback).
void fill_structural_defaults(OcpProblem& p);

/// Opt-in finite-difference fallback: every missing derivative callback of a
/// present function is replaced by a central-difference approximation.
void apply_fd_fallback(OcpProblem& p);

/// Sampling box used by validate_problem.
struct SampleBox {
  Vec x_lo, x_hi;
  Vec u_lo, u_hi;
  double t_lo = 0.0, t_hi = 1.0;
};

/// Report-only validation: evaluates all callbacks at 10 random points inside
/// the box and collects dimension mismatches and constraint-kind
/// inconsistencies. An empty result means the problem is usable.
std::vector<std::string> validate_problem(const OcpProblem& p, const SampleBox& box,
                                          unsigned seed = 42);

}  // namespace vem
