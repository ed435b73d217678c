#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crat/linalg.hpp"
#include "crat/rng.hpp"

namespace crat {

struct Example {
  Matrix features;                      // d x m, one row per token
  int label = 0;                        // {0,1}
  std::vector<std::uint8_t> true_mask;  // ground-truth rationale positions
  std::vector<std::uint8_t> spurious_mask;
};

struct SyntheticDataset {
  std::vector<Example> examples;
  std::string split;
  std::string config_hash;

  std::size_t size() const { return examples.size(); }
};

enum class Split { kTrain, kTestIn, kTestOut };

std::string split_name(Split s);

// Three-token sequences (x1, x2, x3), one scalar feature per token.
// (x1, x2) are bivariate normal; x3 = x1 + eps tracks x1 without causing the
// label; the label thresholds a logistic score of (x1, x2) at 0.5.
struct ToyConfig {
  std::size_t n = 2000;
  double beta0 = 1.0;
  double beta1 = 0.5;
  double beta2 = 1.0;
  double rho_train = 0.5;   // corr(x1, x2) for train / test_in, unit variances
  double cov_ood_00 = 1.5;  // test_out covariance of (x1, x2)
  double cov_ood_01 = -0.5;
  double cov_ood_11 = 1.5;
  double eps_sd = 0.70710678118654752440;  // sqrt(0.5)
};

SyntheticDataset gen_toy_dataset(const ToyConfig& cfg, Split split, Rng& rng);

// Token sequences with planted cause tokens. Features are one-hot token
// identities (m = vocab_size). Ids 0 and 1 are reserved for the two shortcut
// symbols used by inject_spurious; cause and filler ids start at 2.
struct TokenConfig {
  std::size_t vocab_size = 30;
  std::size_t seq_len = 20;
  std::size_t n = 2000;
  std::vector<int> cause_tokens = {2, 3, 4, 5};
  // Label = 1 iff score_bias + sum of cause_weights over planted tokens >= 0.
  // Defaults calibrated so no sequence ever scores exactly 0 and the base
  // rate sits near 0.54.
  std::vector<double> cause_weights = {0.9, 0.7, -0.8, -0.6};
  double score_bias = 0.0;
};

inline constexpr int kShortcutTokenA = 0;  // prepended mostly when y = 1
inline constexpr int kShortcutTokenB = 1;  // prepended mostly when y = 0

SyntheticDataset gen_token_dataset(const TokenConfig& cfg, Rng& rng);

// Prepends one shortcut token per example: token A with probability alpha1
// when y = 1 (else token B), and token B with probability alpha1 when y = 0
// (else token A). Existing mask positions shift right by one.
SyntheticDataset inject_spurious(const SyntheticDataset& ds, double alpha1,
                                 Rng& rng);

// Line-delimited JSON, one example per line with fields
// {features, label, true_mask, spurious_mask}.
void save_dataset(const SyntheticDataset& ds, const std::string& path);
SyntheticDataset load_dataset(const std::string& path);

}  // namespace crat
