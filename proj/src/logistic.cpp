#include "crat/logistic.hpp"

#include <cmath>
#include <stdexcept>

namespace crat {
namespace {

// Gaussian elimination with partial pivoting on the (m+1)-sized Newton system.
Vector solve_linear(Matrix A, Vector b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(A.at(r, col)) > std::abs(A.at(pivot, col))) pivot = r;
    }
    if (std::abs(A.at(pivot, col)) < 1e-300) throw std::runtime_error("singular Newton system");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(A.at(col, c), A.at(pivot, c));
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = A.at(r, col) / A.at(col, col);
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) A.at(r, c) -= factor * A.at(col, c);
      b[r] -= factor * b[col];
    }
  }
  Vector x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    double acc = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) acc -= A.at(ri, c) * x[c];
    x[ri] = acc / A.at(ri, ri);
  }
  return x;
}

}  // namespace

double LogisticModel::predict_prob(std::span<const double> x) const {
  return sigmoid(dot(w, x) + b);
}

LogisticModel fit_logistic(const Matrix& X, const std::vector<int>& y,
                           const std::vector<std::uint8_t>& col_mask,
                           const LogisticFitConfig& cfg) {
  const std::size_t n = X.rows;
  const std::size_t m = X.cols;
  check_same_size(n, y.size(), "fit_logistic labels");
  check_same_size(m, col_mask.size(), "fit_logistic column mask");
  if (n == 0) throw std::invalid_argument("fit_logistic: empty data");

  std::vector<std::size_t> active;
  for (std::size_t c = 0; c < m; ++c) {
    if (col_mask[c]) active.push_back(c);
  }
  const std::size_t k = active.size();

  Vector theta(k + 1, 0.0);  // active weights then intercept
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    Vector grad(k + 1, 0.0);
    Matrix hess(k + 1, k + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = X.row(i);
      double score = theta[k];
      for (std::size_t a = 0; a < k; ++a) score += theta[a] * row[active[a]];
      const double p = sigmoid(score);
      const double resid = p - static_cast<double>(y[i]);
      const double wgt = std::max(p * (1.0 - p), 1e-10);
      for (std::size_t a = 0; a < k; ++a) {
        grad[a] += resid * row[active[a]];
        for (std::size_t bcol = a; bcol < k; ++bcol) {
          hess.at(a, bcol) += wgt * row[active[a]] * row[active[bcol]];
        }
        hess.at(a, k) += wgt * row[active[a]];
      }
      grad[k] += resid;
      hess.at(k, k) += wgt;
    }
    for (std::size_t a = 0; a < k; ++a) {
      grad[a] += cfg.l2 * theta[a];
      hess.at(a, a) += cfg.l2;
    }
    for (std::size_t a = 0; a < k + 1; ++a) {
      hess.at(a, a) += 1e-9;
      for (std::size_t bcol = a + 1; bcol < k + 1; ++bcol) hess.at(bcol, a) = hess.at(a, bcol);
    }
    const Vector step = solve_linear(hess, grad);
    double max_step = 0.0;
    for (std::size_t a = 0; a < k + 1; ++a) {
      theta[a] -= step[a];
      max_step = std::max(max_step, std::abs(step[a]));
    }
    if (max_step < cfg.tol) break;
  }

  LogisticModel model;
  model.w.assign(m, 0.0);
  for (std::size_t a = 0; a < k; ++a) model.w[active[a]] = theta[a];
  model.b = theta[k];
  return model;
}

}  // namespace crat
