#pragma once

#include "vem/common.hpp"

namespace vem {

/// Discretization of [t0, tf] by normalized fractions s in [0, 1]. The
/// fractions are fixed; tf may change during evolution, which rescales the
/// physical node times without touching N or the indexing.
struct TimeGrid {
  int N = 0;
  Vec s;  // N fractions, s[0] = 0, s[N-1] = 1, strictly increasing
  double t0 = 0.0;
  double tf = 0.0;

  /// Uniform fractions s_i = i / (N - 1). Requires N >= 3 and tf > t0.
  static TimeGrid uniform(int N, double t0, double tf);

  /// Arbitrary strictly increasing fractions (first 0, last 1).
  static TimeGrid with_fractions(Vec fractions, double t0, double tf);

  double t(int i) const { return t0 + s[i] * (tf - t0); }
  double dt(int i) const { return (s[i + 1] - s[i]) * (tf - t0); }
  double horizon() const { return tf - t0; }

  /// Composite trapezoid weights for the node range [from, to].
  Vec trapezoid_weights(int from, int to) const;
};

/// Composite trapezoid integral of per-node scalar values between node
/// `from` and node `to` (inclusive indices).
double quad(const TimeGrid& grid, const Eigen::Ref<const Vec>& values, int from, int to);

/// Full-range convenience overload.
double quad(const TimeGrid& grid, const Eigen::Ref<const Vec>& values);

}  // namespace vem
