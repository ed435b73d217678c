#include "crat/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace crat {

double clamp_prob(double p) {
  if (p < kProbFloor) return kProbFloor;
  if (p > 1.0 - kProbFloor) return 1.0 - kProbFloor;
  return p;
}

double sigmoid(double x) {
  double p;
  if (x >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    p = e / (1.0 + e);
  }
  return clamp_prob(p);
}

double logit(double p) {
  return std::log(p) - std::log1p(-p);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double sum(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_same_size(std::size_t a, std::size_t b, const std::string& what) {
  if (a != b) {
    throw std::invalid_argument("size mismatch in " + what + ": " +
                                std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace crat
