#pragma once

#include <vector>

#include "crat/linalg.hpp"

namespace crat {

// L2-regularized logistic regression fitted by Newton iterations. The
// penalty applies to the weights only, never the intercept; regularization
// keeps the fit finite on separable data.
struct LogisticModel {
  Vector w;
  double b = 0.0;

  double predict_prob(std::span<const double> x) const;
};

struct LogisticFitConfig {
  double l2 = 1.0;
  int max_iters = 100;
  double tol = 1e-10;
};

// Rows of X are observations; labels in {0,1}. A column mask of zeros drops
// a feature from the fit (its weight stays exactly 0).
LogisticModel fit_logistic(const Matrix& X, const std::vector<int>& y,
                           const std::vector<std::uint8_t>& col_mask,
                           const LogisticFitConfig& cfg = {});

}  // namespace crat
