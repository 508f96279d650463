#include "vem/fd.hpp"

#include <cmath>
#include <limits>

namespace vem::fd {

namespace {
const double kSqrtEps = std::sqrt(std::numeric_limits<double>::epsilon());

void check_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) {
    throw EvaluationError(std::string("finite-difference evaluation produced a non-finite ") +
                          what);
  }
}
}  // namespace

double step_for(double v) { return kSqrtEps * std::max(1.0, std::abs(v)); }

Mat jacobian(const std::function<Vec(const Vec&)>& fn, const Vec& at) {
  Vec probe = fn(at);
  check_finite(probe, "value");
  Mat J(probe.size(), at.size());
  Vec x = at;
  for (int j = 0; j < at.size(); ++j) {
    const double h = step_for(at[j]);
    x[j] = at[j] + h;
    Vec hi = fn(x);
    x[j] = at[j] - h;
    Vec lo = fn(x);
    x[j] = at[j];
    check_finite(hi, "value");
    check_finite(lo, "value");
    J.col(j) = (hi - lo) / (2.0 * h);
  }
  return J;
}

Vec gradient(const std::function<double(const Vec&)>& fn, const Vec& at) {
  Vec grad(at.size());
  Vec x = at;
  for (int j = 0; j < at.size(); ++j) {
    const double h = step_for(at[j]);
    x[j] = at[j] + h;
    const double hi = fn(x);
    x[j] = at[j] - h;
    const double lo = fn(x);
    x[j] = at[j];
    if (!std::isfinite(hi) || !std::isfinite(lo)) {
      throw EvaluationError("finite-difference evaluation produced a non-finite value");
    }
    grad[j] = (hi - lo) / (2.0 * h);
  }
  return grad;
}

double derivative(const std::function<double(double)>& fn, double at) {
  const double h = step_for(at);
  const double hi = fn(at + h);
  const double lo = fn(at - h);
  if (!std::isfinite(hi) || !std::isfinite(lo)) {
    throw EvaluationError("finite-difference evaluation produced a non-finite value");
  }
  return (hi - lo) / (2.0 * h);
}

Vec vector_derivative(const std::function<Vec(double)>& fn, double at) {
  const double h = step_for(at);
  Vec hi = fn(at + h);
  Vec lo = fn(at - h);
  check_finite(hi, "value");
  check_finite(lo, "value");
  return (hi - lo) / (2.0 * h);
}

}  // namespace vem::fd
