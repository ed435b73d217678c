#pragma once

#include <functional>

#include "crat/linalg.hpp"

namespace crat {

// Compares an analytic gradient against central finite differences of f at
// theta. Returns max_i |g_analytic_i - g_central_i| / max(1, |g_central_i|).
// Throws if f evaluates to a non-finite value at any probe point.
double grad_check(const std::function<double(const Vector&)>& f,
                  const Vector& theta, const Vector& analytic_grad,
                  double h = 1e-5);

}  // namespace crat
