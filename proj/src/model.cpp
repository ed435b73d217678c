#include "crat/model.hpp"

#include <stdexcept>

namespace crat {

Vector selector_forward(const SelectorParams& params, const Matrix& features) {
  check_same_size(params.w.size(), features.cols, "selector_forward");
  if (!all_finite(features.data)) throw std::invalid_argument("selector_forward: non-finite features");
  Vector probs(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) {
    probs[i] = sigmoid(dot(params.w, features.row(i)) + params.b);
  }
  return probs;
}

SelectionMask gumbel_sample(const Vector& probs, double tau, Rng& rng) {
  if (tau <= 0.0) throw std::invalid_argument("gumbel_sample: tau must be positive");
  SelectionMask mask;
  mask.probs = probs;
  mask.soft.resize(probs.size());
  mask.hard.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double g1 = rng.next_gumbel();
    const double g2 = rng.next_gumbel();
    const double s = sigmoid((logit(clamp_prob(probs[i])) + g1 - g2) / tau);
    mask.soft[i] = s;
    mask.hard[i] = s >= 0.5 ? 1 : 0;
  }
  return mask;
}

double predictor_forward(const PredictorParams& params, const Matrix& features,
                         const Vector& mask) {
  check_same_size(mask.size(), features.rows, "predictor_forward mask");
  check_same_size(params.w.size(), features.cols, "predictor_forward weights");
  const double d = static_cast<double>(features.rows);
  double pooled_score = 0.0;
  for (std::size_t i = 0; i < features.rows; ++i) {
    pooled_score += mask[i] * dot(params.w, features.row(i));
  }
  return sigmoid(pooled_score / d + params.b);
}

std::vector<std::uint8_t> flip_selection(const std::vector<std::uint8_t>& z, std::size_t j) {
  if (j >= z.size()) throw std::out_of_range("flip_selection: index out of range");
  std::vector<std::uint8_t> out = z;
  out[j] = out[j] ? 0 : 1;
  return out;
}

CpnsReport estimate_cpns(const PredictorParams& params, const Matrix& features,
                         const std::vector<std::uint8_t>& z,
                         const std::vector<int>& subset, int y) {
  if (subset.empty()) throw std::invalid_argument("estimate_cpns: empty subset");
  check_same_size(z.size(), features.rows, "estimate_cpns mask");

  Vector zf(z.begin(), z.end());
  const double f_keep = predictor_forward(params, features, zf);
  const double p_keep = y == 1 ? f_keep : 1.0 - f_keep;

  CpnsReport report;
  report.rationale_set = subset;
  Vector lbs;
  lbs.reserve(subset.size());
  double additive = 0.0;
  for (int j : subset) {
    if (j < 0 || static_cast<std::size_t>(j) >= z.size()) {
      throw std::out_of_range("estimate_cpns: subset index out of range");
    }
    Vector flipped = zf;
    flipped[static_cast<std::size_t>(j)] = 1.0 - flipped[static_cast<std::size_t>(j)];
    const double f_flip = predictor_forward(params, features, flipped);
    const double p_flip = y == 1 ? f_flip : 1.0 - f_flip;
    CpnsReport::TokenEntry entry;
    entry.identified = cpns_j_identified(p_keep, p_flip);
    entry.lower_bound = cpns_j_lower_bound(p_keep, p_flip);
    report.per_token[j] = entry;
    lbs.push_back(entry.lower_bound);
    additive += entry.lower_bound;
  }
  report.aggregate_lb = aggregate_cpns(lbs, subset);
  report.additive_score = additive / static_cast<double>(features.rows);
  return report;
}

}  // namespace crat
