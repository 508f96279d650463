#include "vem/dopri5.hpp"

#include <cmath>

namespace vem {

namespace {
// Dormand-Prince 4(5) tableau (the ode45 pair).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafe = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kFacc1 = 5.0;   // 1 / min-scale
constexpr double kFacc2 = 0.1;   // 1 / max-scale
}  // namespace

Dopri5Stepper::Dopri5Stepper(double rtol, double atol) : rtol_(rtol), atol_(atol) {}

void Dopri5Stepper::reset_controller() {
  errold_ = 1e-4;
  just_rejected_ = false;
}

double Dopri5Stepper::scaled_error(const Vec& y, const Vec& y_new, const Vec& err) const {
  double acc = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    const double sk = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y_new[i]));
    const double e = err[i] / sk;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(y.size()));
}

double Dopri5Stepper::initial_step(const Vec& y0, const Vec& f0, double t_span) const {
  double d0 = 0.0, d1 = 0.0;
  for (int i = 0; i < y0.size(); ++i) {
    const double sk = atol_ + rtol_ * std::abs(y0[i]);
    d0 += (y0[i] / sk) * (y0[i] / sk);
    d1 += (f0[i] / sk) * (f0[i] / sk);
  }
  d0 = std::sqrt(d0 / y0.size());
  d1 = std::sqrt(d1 / y0.size());
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  return std::min(h, t_span);
}

Dopri5Stepper::StepResult Dopri5Stepper::step(const Rhs& rhs, double t, const Vec& y,
                                              const Vec& k1, double h) {
  StepResult res;
  res.h_used = h;
  Vec y5, k7, err_vec;
  double err = 0.0;
  try {
    evals_ += 6;
    const Vec k2 = rhs(t + c2 * h, y + h * (a21 * k1));
    const Vec k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Vec k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 =
        rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y5 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    k7 = rhs(t + h, y5);
    err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    err = y5.allFinite() ? scaled_error(y, y5, err_vec)
                         : std::numeric_limits<double>::infinity();
  } catch (const VemError&) {
    // A failed stage evaluation is treated like an oversized step.
    res.accepted = false;
    res.h_next = 0.5 * h;
    res.error = std::numeric_limits<double>::infinity();
    just_rejected_ = true;
    return res;
  }

  res.error = err;
  const double fac11 = std::pow(std::max(err, 1e-30), kExpo1);
  if (std::isfinite(err) && err <= 1.0) {
    res.accepted = true;
    res.t_new = t + h;
    res.y_new = std::move(y5);
    res.k_last = std::move(k7);
    double fac = fac11 / std::pow(errold_, kBeta);
    fac = std::max(kFacc2, std::min(kFacc1, fac / kSafe));
    res.h_next = h / fac;
    if (just_rejected_) res.h_next = std::min(res.h_next, h);
    errold_ = std::max(err, 1e-4);
    just_rejected_ = false;
  } else {
    res.accepted = false;
    res.h_next = h / std::min(kFacc1, fac11 / kSafe);
    if (!std::isfinite(err)) res.h_next = 0.5 * h;
    just_rejected_ = true;
  }
  return res;
}

}  // namespace vem
