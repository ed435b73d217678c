#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace crat {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  std::span<double> row(std::size_t r) {
    return {data.data() + r * cols, cols};
  }
};

// Probabilities are clamped into [kProbFloor, 1 - kProbFloor] before any log.
inline constexpr double kProbFloor = 1e-12;

double clamp_prob(double p);

// Numerically stable logistic function; output clamped to (0,1) by
// clamp_prob so downstream logs are always finite.
double sigmoid(double x);

// log(p / (1-p)) of an already clamped probability.
double logit(double p);

double dot(std::span<const double> a, std::span<const double> b);

// Left-to-right sum; fixed order keeps results bit-reproducible.
double sum(std::span<const double> v);

bool all_finite(std::span<const double> v);

void check_same_size(std::size_t a, std::size_t b, const std::string& what);

}  // namespace crat
