#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "crat/dataset.hpp"
#include "crat/logistic.hpp"
#include "crat/model.hpp"
#include "crat/rng.hpp"

namespace crat {

struct TrainConfig {
  double lambda = 1.0;     // sparsity weight
  double mu = 0.1;         // causality weight
  double k_pct = 5.0;      // flip-subset size as % of sequence length
  double pi0 = 0.2;        // target selection rate
  double tau = 0.5;        // Gumbel-Softmax temperature
  double lr = 1e-2;        // plain SGD step size
  std::size_t epochs = 10;
  std::size_t batch_size = 50;
  double c = 1.0;          // shift inside log(lower_bound + c)
  std::uint64_t seed = 0;
  double eval_k_pct = 10.0;  // top-k% used for per-epoch validation metrics

  void validate() const;
};

struct ModelParams {
  SelectorParams selector;
  PredictorParams predictor;
};

ModelParams init_params(std::size_t feature_dim);

// Weighted loss terms; total = ce + sparsity + causality.
struct LossComponents {
  double ce = 0.0;
  double sparsity = 0.0;
  double causality = 0.0;
  double total = 0.0;
};

struct ModelGrads {
  Vector selector_w;
  double selector_b = 0.0;
  Vector predictor_w;
  double predictor_b = 0.0;
};

// Uniform sample without replacement of size max(1, round(k_pct/100 * d))
// from the selected positions; all of them when fewer are selected than the
// target. All-zero selections yield an empty list (the caller skips the
// causality term and counts the event).
std::vector<int> sample_flip_subset(const std::vector<std::uint8_t>& z,
                                    double k_pct, Rng& rng);

// Loss and analytic gradients for one example with frozen Gumbel noise
// (noise_diff = g1 - g2 per token) and a fixed flip subset.
//
// Training mode (relaxed = false): the cross-entropy term uses the soft
// sample, the causality term the hard sample, with straight-through
// gradients through the threshold. Relaxed mode evaluates the causality
// term on the soft sample itself, which makes the whole loss a smooth
// function of the parameters; gradient checks use it as the oracle surface.
LossComponents example_objective(const ModelParams& params, const Example& ex,
                                 const Vector& noise_diff,
                                 const std::vector<int>& flip_subset,
                                 const TrainConfig& cfg, bool relaxed,
                                 ModelGrads* grads);

struct ObjectiveResult {
  LossComponents components;
  ModelGrads grads;
  std::size_t empty_selections = 0;
};

// Batch loss: mean over examples of CE + lambda * KL sparsity - mu * mean
// log(lower_bound + c) over the sampled flip subset. Per-example randomness
// comes from rng.split(dataset index), so batch composition does not affect
// an example's draw.
ObjectiveResult objective(const SyntheticDataset& ds,
                          std::span<const std::size_t> batch,
                          const ModelParams& params, const TrainConfig& cfg,
                          const Rng& rng);

struct EpochRow {
  std::size_t epoch = 0;
  double ce = 0.0;
  double sparsity = 0.0;
  double causality = 0.0;
  double val_acc = 0.0;
  double val_f1 = 0.0;
  double val_cpns_lb = 0.0;
};

struct TrainReport {
  std::vector<EpochRow> epochs;
  ModelParams params;
  std::size_t empty_selection_events = 0;
};

class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Algorithm-style loop: shuffled minibatches, plain SGD on both parameter
// sets, deterministic given cfg.seed. Throws DivergenceError when the loss
// stops being finite.
TrainReport fit(const SyntheticDataset& train_ds, const SyntheticDataset& val_ds,
                const TrainConfig& cfg);

// Subset-ranking experiment on few-feature datasets (one scalar feature per
// token). For each candidate rationale set S, fits an L2 logistic model on
// the columns in S, evaluates accuracy on the eval split, and scores S by
// the dataset mean of sum_{j in S} max(0, p_keep - p_flip) / d where p_flip
// re-evaluates the same model with feature j zeroed -- the predictor-style
// flip of the learned pipeline.
struct SubsetScanRow {
  std::vector<int> subset;
  double avg_cpns_lb = 0.0;
  double accuracy = 0.0;
};

std::vector<SubsetScanRow> cpns_subset_scan(
    const SyntheticDataset& train, const SyntheticDataset& eval_split,
    const std::vector<std::vector<int>>& subsets,
    const LogisticFitConfig& fit_cfg = {});

// All non-empty subsets of {0..d-1}, smallest first, for the d-feature scan.
std::vector<std::vector<int>> all_nonempty_subsets(std::size_t d);

}  // namespace crat
