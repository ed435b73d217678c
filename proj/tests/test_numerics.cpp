#include <cmath>

#include "crat/gradcheck.hpp"
#include "crat/linalg.hpp"
#include "crat/rng.hpp"
#include "doctest.h"

using namespace crat;

TEST_CASE("sigmoid fixed points") {
  CHECK(sigmoid(0.0) == doctest::Approx(0.5));
  CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75));
  CHECK(sigmoid(-std::log(3.0)) == doctest::Approx(0.25));
}

TEST_CASE("sigmoid saturates without NaN") {
  const double hi = sigmoid(1e308);
  CHECK(std::isfinite(hi));
  CHECK(hi <= 1.0 - kProbFloor);
  CHECK(hi > 0.999);
  const double lo = sigmoid(-1e308);
  CHECK(std::isfinite(lo));
  CHECK(lo >= kProbFloor);
  CHECK(std::isfinite(std::log(lo)));
  CHECK(std::isfinite(std::log1p(-hi)));
}

TEST_CASE("sigmoid is monotone") {
  double prev = 0.0;
  for (double x = -30.0; x <= 30.0; x += 0.37) {
    const double v = sigmoid(x);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("logit inverts sigmoid in the interior") {
  for (double x : {-20.0, -3.0, -0.5, 0.0, 0.7, 5.0, 20.0}) {
    CHECK(logit(sigmoid(x)) == doctest::Approx(x).epsilon(1e-6));
  }
}

TEST_CASE("fixed-order reductions are deterministic") {
  Vector v;
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) v.push_back(rng.next_gaussian());
  const double s1 = sum(v);
  const double s2 = sum(v);
  CHECK(s1 == s2);
  CHECK(dot(v, v) == dot(v, v));
}

TEST_CASE("grad_check accepts an exact quadratic gradient") {
  const Vector theta = {0.3, -1.2, 2.0};
  const auto f = [](const Vector& t) {
    double acc = 0.0;
    for (double x : t) acc += x * x;
    return acc;
  };
  Vector analytic = {0.6, -2.4, 4.0};
  CHECK(grad_check(f, theta, analytic, 1e-5) < 1e-8);
}

TEST_CASE("grad_check flags a wrong gradient") {
  const Vector theta = {1.0};
  const auto f = [](const Vector& t) { return t[0] * t[0]; };
  const Vector wrong = {3.0};  // true gradient is 2
  CHECK(grad_check(f, theta, wrong, 1e-5) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("grad_check rejects non-finite objectives") {
  const Vector theta = {0.0};
  const auto f = [](const Vector& t) { return std::sqrt(t[0]); };  // NaN at the minus probe
  CHECK_THROWS(grad_check(f, theta, {0.0}, 1e-5));
}
