#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "crat/dataset.hpp"
#include "crat/model.hpp"

namespace crat {

struct Metrics {
  double acc = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fdr = 0.0;
  double avg_cpns_lb = 0.0;
  std::size_t n_examples = 0;
};

// Marks the max(1, round(k_pct/100 * d)) highest-probability positions;
// ties break toward the lowest index.
std::vector<std::uint8_t> select_top_k(const Vector& probs, double k_pct);

struct PrfCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  void add(const std::vector<std::uint8_t>& pred_mask,
           const std::vector<std::uint8_t>& true_mask);
};

struct PrfResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PrfResult prf_from_counts(const PrfCounts& counts);

// Single-pair precision/recall/F1; corpus metrics accumulate PrfCounts
// across examples first (micro averaging).
PrfResult token_prf(const std::vector<std::uint8_t>& pred_mask,
                    const std::vector<std::uint8_t>& true_mask);

// Fraction of spurious (injected) tokens that the prediction selects;
// 0 when no spurious tokens exist.
double fdr(const std::vector<std::uint8_t>& pred_mask,
           const std::vector<std::uint8_t>& spurious_mask);

// Average aggregate CPNS lower bound at each highlighted length: top-k%
// selection per example, the full selected set as the flip subset,
// geometric-mean aggregation, averaged over the dataset.
std::map<double, double> cpns_length_sweep(const SelectorParams& selector,
                                           const PredictorParams& predictor,
                                           const SyntheticDataset& ds,
                                           const std::vector<double>& ks);

// Full metric row at one highlighted length: predictions run the hard top-k
// mask through the predictor; P/R/F1 are micro-averaged against true masks,
// FDR against spurious masks.
Metrics evaluate(const SelectorParams& selector, const PredictorParams& predictor,
                 const SyntheticDataset& ds, double k_pct);

}  // namespace crat
