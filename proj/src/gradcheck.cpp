#include "crat/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace crat {

double grad_check(const std::function<double(const Vector&)>& f,
                  const Vector& theta, const Vector& analytic_grad, double h) {
  check_same_size(theta.size(), analytic_grad.size(), "grad_check");
  if (h <= 0.0) throw std::invalid_argument("grad_check: h must be positive");

  double max_err = 0.0;
  Vector probe = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + h;
    const double fp = f(probe);
    probe[i] = theta[i] - h;
    const double fm = f(probe);
    probe[i] = theta[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw std::runtime_error("grad_check: non-finite objective at probe " +
                               std::to_string(i));
    }
    const double central = (fp - fm) / (2.0 * h);
    const double err =
        std::abs(analytic_grad[i] - central) / std::max(1.0, std::abs(central));
    if (err > max_err) max_err = err;
  }
  return max_err;
}

}  // namespace crat
