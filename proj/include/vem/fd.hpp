#pragma once

#include <functional>

#include "vem/common.hpp"

namespace vem::fd {

/// Central-difference step, h = sqrt(machine eps) * max(1, |v|).
double step_for(double v);

/// Jacobian of a vector-valued function of a vector argument.
Mat jacobian(const std::function<Vec(const Vec&)>& fn, const Vec& at);

/// Gradient of a scalar function of a vector argument.
Vec gradient(const std::function<double(const Vec&)>& fn, const Vec& at);

/// Derivative of a scalar function of a scalar argument.
double derivative(const std::function<double(double)>& fn, double at);

/// Derivative of a vector-valued function of a scalar argument.
Vec vector_derivative(const std::function<Vec(double)>& fn, double at);

}  // namespace vem::fd
