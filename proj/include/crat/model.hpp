#pragma once

#include <cstdint>
#include <vector>

#include "crat/linalg.hpp"
#include "crat/poc.hpp"
#include "crat/rng.hpp"

namespace crat {

// Per-token selection scorer: p_i = sigmoid(w . x_i + b). For one-hot token
// features this makes w a per-token-id score table, the desk-scale
// equivalent of an embedding-plus-linear selector head.
struct SelectorParams {
  Vector w;
  double b = 0.0;
};

// Classifier over mask-weighted mean-pooled features. The pooling
// denominator is the sequence length d (fixed), not the number of selected
// tokens, so a flipped all-zero-feature token leaves the output unchanged.
struct PredictorParams {
  Vector w;
  double b = 0.0;
};

struct SelectionMask {
  Vector probs;                    // selector probabilities p
  Vector soft;                     // binary-concrete samples s in (0,1)
  std::vector<std::uint8_t> hard;  // 1[s >= 0.5]
};

// p_i = sigmoid(w . x_i + b), independently per token.
Vector selector_forward(const SelectorParams& params, const Matrix& features);

// Binary-concrete (Gumbel-Softmax) relaxation per token:
//   s_i = sigmoid((logit(p_i) + g1 - g2) / tau),  hard_i = 1[s_i >= 0.5].
// Thresholding at 0.5 makes hard_i exactly Bernoulli(p_i) for every tau.
SelectionMask gumbel_sample(const Vector& probs, double tau, Rng& rng);

// Probability of Y = 1 from mask-weighted pooled features. The mask may be
// soft (relaxed samples) or hard (0/1 values).
double predictor_forward(const PredictorParams& params, const Matrix& features,
                         const Vector& mask);

std::vector<std::uint8_t> flip_selection(const std::vector<std::uint8_t>& z, std::size_t j);

// Theorem-style estimate from the predictor: for each j in subset,
// p_keep = predicted probability of class y under z and p_flip the same
// with z_j flipped; entries carry max(0, p_keep - p_flip) and the report
// aggregates them over the subset.
CpnsReport estimate_cpns(const PredictorParams& params, const Matrix& features,
                         const std::vector<std::uint8_t>& z,
                         const std::vector<int>& subset, int y);

}  // namespace crat
