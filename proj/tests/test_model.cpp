#include <cmath>
#include <stdexcept>

#include "crat/gradcheck.hpp"
#include "crat/model.hpp"
#include "doctest.h"

using namespace crat;

namespace {

Matrix random_features(std::size_t d, std::size_t m, Rng& rng) {
  Matrix f(d, m);
  for (auto& v : f.data) v = rng.next_gaussian();
  return f;
}

}  // namespace

TEST_CASE("selector with zero weights scores one half everywhere") {
  SelectorParams sel{Vector(4, 0.0), 0.0};
  Rng rng(1);
  const Matrix x = random_features(6, 4, rng);
  for (double p : selector_forward(sel, x)) CHECK(p == doctest::Approx(0.5));
}

TEST_CASE("large selector bias saturates the probabilities") {
  SelectorParams sel{Vector(4, 0.0), 10.0};
  Rng rng(2);
  const Matrix x = random_features(5, 4, rng);
  for (double p : selector_forward(sel, x)) CHECK(p > 0.9999);
}

TEST_CASE("selector gradient of sum of probabilities matches finite differences") {
  Rng rng(3);
  const Matrix x = random_features(5, 3, rng);
  Vector w = {0.4, -0.7, 0.2};
  const double b = 0.1;
  const auto f = [&](const Vector& weights) {
    SelectorParams sel{weights, b};
    const Vector p = selector_forward(sel, x);
    return sum(p);
  };
  // d sum(p) / dw = sum_i p_i (1-p_i) x_i
  SelectorParams sel{w, b};
  const Vector p = selector_forward(sel, x);
  Vector analytic(3, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t c = 0; c < 3; ++c) analytic[c] += p[i] * (1.0 - p[i]) * x.at(i, c);
  }
  CHECK(grad_check(f, w, analytic, 1e-5) < 1e-4);
}

TEST_CASE("gumbel sampling is deterministic given the stream") {
  const Vector probs = {0.2, 0.5, 0.9};
  Rng r1(10), r2(10);
  const SelectionMask a = gumbel_sample(probs, 0.5, r1);
  const SelectionMask b = gumbel_sample(probs, 0.5, r2);
  CHECK(a.soft == b.soft);
  CHECK(a.hard == b.hard);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    CHECK(a.hard[i] == (a.soft[i] >= 0.5 ? 1 : 0));
  }
}

TEST_CASE("saturated probability pins the hard sample") {
  const Vector probs = {1.0 - 1e-12};
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    CHECK(gumbel_sample(probs, 0.5, rng).hard[0] == 1);
  }
}

TEST_CASE("hard samples are Bernoulli(p) regardless of temperature") {
  for (double tau : {0.25, 0.5, 2.0}) {
    for (double p : {0.1, 0.3, 0.5, 0.9}) {
      Rng rng(static_cast<std::uint64_t>(p * 1000 + tau * 10));
      const int n = 10000;
      int ones = 0;
      for (int i = 0; i < n; ++i) {
        ones += gumbel_sample({p}, tau, rng).hard[0];
      }
      const double se = std::sqrt(p * (1.0 - p) / n);
      CHECK(std::abs(static_cast<double>(ones) / n - p) < 3.0 * se);
    }
  }
}

TEST_CASE("hard samples pass a chi-square test against Bernoulli(p)") {
  // alpha = 0.01 critical value for 1 degree of freedom.
  const double critical = 6.634896601;
  for (double p : {0.1, 0.5, 0.9}) {
    Rng rng(static_cast<std::uint64_t>(1000 * p) + 5);
    const int n = 10000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += gumbel_sample({p}, 0.5, rng).hard[0];
    const double e1 = n * p, e0 = n * (1.0 - p);
    const double o1 = ones, o0 = n - ones;
    const double chi2 = (o1 - e1) * (o1 - e1) / e1 + (o0 - e0) * (o0 - e0) / e0;
    CHECK(chi2 < critical);
  }
}

TEST_CASE("predictor with empty mask returns sigmoid of the bias") {
  Rng rng(20);
  const Matrix x = random_features(4, 3, rng);
  PredictorParams pred{Vector{1.0, -2.0, 0.5}, 0.7};
  CHECK(predictor_forward(pred, x, Vector(4, 0.0)) == doctest::Approx(sigmoid(0.7)));
}

TEST_CASE("pooling is permutation symmetric") {
  Rng rng(21);
  const Matrix x = random_features(4, 3, rng);
  Matrix xp(4, 3);
  const std::size_t perm[4] = {2, 0, 3, 1};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t c = 0; c < 3; ++c) xp.at(i, c) = x.at(perm[i], c);
  }
  PredictorParams pred{Vector{0.3, 1.1, -0.4}, -0.2};
  const Vector z = {1.0, 0.0, 1.0, 1.0};
  Vector zp(4);
  for (std::size_t i = 0; i < 4; ++i) zp[i] = z[perm[i]];
  CHECK(predictor_forward(pred, x, z) == doctest::Approx(predictor_forward(pred, xp, zp)));
}

TEST_CASE("predictor gradient wrt weights, bias and mask matches finite differences") {
  Rng rng(22);
  const Matrix x = random_features(4, 3, rng);
  // Pack (w, b, z) into one parameter vector.
  Vector packed = {0.5, -0.3, 0.8, 0.1, 0.9, 0.2, 0.6, 0.4};
  const auto f = [&](const Vector& t) {
    PredictorParams pred{{t[0], t[1], t[2]}, t[3]};
    const Vector z(t.begin() + 4, t.end());
    return predictor_forward(pred, x, z);
  };
  PredictorParams pred{{packed[0], packed[1], packed[2]}, packed[3]};
  const Vector z(packed.begin() + 4, packed.end());
  const double out = predictor_forward(pred, x, z);
  const double slope = out * (1.0 - out);
  const double d = 4.0;
  Vector analytic(8, 0.0);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t c = 0; c < 3; ++c) analytic[c] += slope * z[i] * x.at(i, c) / d;
    analytic[4 + i] = slope * dot(pred.w, x.row(i)) / d;
  }
  analytic[3] = slope;
  CHECK(grad_check(f, packed, analytic, 1e-6) < 1e-4);
}

TEST_CASE("flip_selection flips exactly one coordinate") {
  const std::vector<std::uint8_t> z = {1, 0, 1};
  const auto f1 = flip_selection(z, 1);
  CHECK(f1 == std::vector<std::uint8_t>{1, 1, 1});
  CHECK(flip_selection(f1, 1) == z);
  int hamming = 0;
  for (std::size_t i = 0; i < z.size(); ++i) hamming += z[i] != f1[i];
  CHECK(hamming == 1);
  CHECK_THROWS_AS(flip_selection(z, 3), std::out_of_range);
}

TEST_CASE("estimate_cpns with a constant predictor is all zeros") {
  Rng rng(30);
  const Matrix x = random_features(5, 3, rng);
  PredictorParams pred{Vector(3, 0.0), 0.3};
  const std::vector<std::uint8_t> z = {1, 1, 0, 1, 0};
  const CpnsReport rep = estimate_cpns(pred, x, z, {0, 1, 3}, 1);
  CHECK(rep.aggregate_lb == 0.0);
  for (const auto& [j, entry] : rep.per_token) CHECK(entry.lower_bound == 0.0);
}

TEST_CASE("single decisive token has lower bound exactly p_keep - p_flip") {
  Matrix x(2, 2);
  x.at(0, 0) = 1.0;  // the predictive token
  x.at(1, 1) = 1.0;  // carries no weight
  PredictorParams pred{Vector{4.0, 0.0}, -0.5};
  const std::vector<std::uint8_t> z = {1, 0};
  const CpnsReport rep = estimate_cpns(pred, x, z, {0}, 1);
  const double p_keep = sigmoid(4.0 / 2.0 - 0.5);
  const double p_flip = sigmoid(-0.5);
  CHECK(rep.per_token.at(0).lower_bound == doctest::Approx(p_keep - p_flip));
  CHECK(rep.aggregate_lb == doctest::Approx(p_keep - p_flip));
}

TEST_CASE("estimate_cpns is invariant to relabeling classes") {
  Rng rng(31);
  const Matrix x = random_features(5, 3, rng);
  PredictorParams pred{Vector{1.0, -0.8, 0.5}, 0.2};
  PredictorParams flipped{Vector{-1.0, 0.8, -0.5}, -0.2};  // complements every output
  const std::vector<std::uint8_t> z = {1, 0, 1, 1, 0};
  const CpnsReport a = estimate_cpns(pred, x, z, {0, 2}, 1);
  const CpnsReport b = estimate_cpns(flipped, x, z, {0, 2}, 0);
  CHECK(a.aggregate_lb == doctest::Approx(b.aggregate_lb).epsilon(1e-9));
}

TEST_CASE("flipping a zero-feature token leaves the estimate unchanged") {
  Matrix x(3, 2);
  x.at(0, 0) = 1.0;
  // token 1 is the zero vector
  x.at(2, 1) = -1.0;
  PredictorParams pred{Vector{2.0, 1.5}, 0.1};
  const std::vector<std::uint8_t> z = {1, 1, 1};
  const CpnsReport rep = estimate_cpns(pred, x, z, {1}, 1);
  CHECK(rep.per_token.at(1).identified.value() == doctest::Approx(0.0));
  CHECK(rep.per_token.at(1).lower_bound == 0.0);
}

TEST_CASE("estimate_cpns rejects an empty subset") {
  Rng rng(32);
  const Matrix x = random_features(3, 2, rng);
  PredictorParams pred{Vector(2, 0.5), 0.0};
  CHECK_THROWS_AS(estimate_cpns(pred, x, {1, 0, 1}, {}, 1), std::invalid_argument);
}
