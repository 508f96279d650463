#pragma once

#include <functional>

#include "vem/common.hpp"

namespace vem {

/// Dormand-Prince 4(5) embedded step with PI step-size control (the ode45
/// pair). The first stage is supplied by the caller so the FSAL property can
/// be exploited across accepted steps.
class Dopri5Stepper {
 public:
  using Rhs = std::function<Vec(double, const Vec&)>;

  Dopri5Stepper(double rtol, double atol);

  struct StepResult {
    bool accepted = false;
    double t_new = 0.0;
    Vec y_new;
    Vec k_last;     // rhs at (t_new, y_new); next step's first stage
    double h_used = 0.0;
    double h_next = 0.0;
    double error = 0.0;
  };

  /// Attempts one step of size h from (t, y) with k1 = rhs(t, y) given.
  StepResult step(const Rhs& rhs, double t, const Vec& y, const Vec& k1, double h);

  /// Initial step-size heuristic from the scaled norms of y and its rate.
  double initial_step(const Vec& y0, const Vec& f0, double t_span) const;

  /// Resets the PI controller memory (after discontinuous state changes).
  void reset_controller();

  long evals() const { return evals_; }

 private:
  double scaled_error(const Vec& y, const Vec& y_new, const Vec& err) const;

  double rtol_, atol_;
  double errold_ = 1e-4;
  bool just_rejected_ = false;
  long evals_ = 0;
};

}  // namespace vem
