#include "crat/train.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crat/eval.hpp"

namespace crat {

void TrainConfig::validate() const {
  if (lambda < 0.0 || mu < 0.0) throw std::invalid_argument("lambda and mu must be >= 0");
  if (k_pct <= 0.0 || k_pct > 100.0) throw std::invalid_argument("k_pct must be in (0, 100]");
  if (pi0 <= 0.0 || pi0 >= 1.0) throw std::invalid_argument("pi0 must be in (0, 1)");
  if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
  if (c <= 0.0) throw std::invalid_argument("c must be positive");
  if (lr < 0.0) throw std::invalid_argument("lr must be >= 0");
  if (epochs == 0 || batch_size == 0) throw std::invalid_argument("epochs and batch_size must be >= 1");
  if (eval_k_pct <= 0.0 || eval_k_pct > 100.0) throw std::invalid_argument("eval_k_pct must be in (0, 100]");
}

ModelParams init_params(std::size_t feature_dim) {
  ModelParams p;
  p.selector.w.assign(feature_dim, 0.0);
  p.predictor.w.assign(feature_dim, 0.0);
  return p;
}

std::vector<int> sample_flip_subset(const std::vector<std::uint8_t>& z,
                                    double k_pct, Rng& rng) {
  if (k_pct <= 0.0 || k_pct > 100.0) throw std::invalid_argument("k_pct must be in (0, 100]");
  std::vector<int> selected;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i]) selected.push_back(static_cast<int>(i));
  }
  if (selected.empty()) return {};
  const std::size_t target = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(k_pct / 100.0 * static_cast<double>(z.size()))));
  if (selected.size() <= target) return selected;
  // Partial Fisher-Yates over the selected indices.
  for (std::size_t i = 0; i < target; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(selected.size() - i));
    std::swap(selected[i], selected[j]);
  }
  selected.resize(target);
  std::sort(selected.begin(), selected.end());
  return selected;
}

LossComponents example_objective(const ModelParams& params, const Example& ex,
                                 const Vector& noise_diff,
                                 const std::vector<int>& flip_subset,
                                 const TrainConfig& cfg, bool relaxed,
                                 ModelGrads* grads) {
  const std::size_t d = ex.features.rows;
  const std::size_t m = ex.features.cols;
  check_same_size(noise_diff.size(), d, "example_objective noise");
  check_same_size(params.selector.w.size(), m, "example_objective selector");
  check_same_size(params.predictor.w.size(), m, "example_objective predictor");
  const double dd = static_cast<double>(d);
  const double y = static_cast<double>(ex.label);
  const double sgn = 2.0 * y - 1.0;

  // Per-token selector scores and relaxed samples. The concrete sample uses
  // the score directly since logit(sigmoid(a)) = a.
  Vector a(d), p(d), s(d), ds_da(d), wx(d);
  std::vector<std::uint8_t> z(d);
  for (std::size_t i = 0; i < d; ++i) {
    a[i] = dot(params.selector.w, ex.features.row(i)) + params.selector.b;
    p[i] = sigmoid(a[i]);
    s[i] = sigmoid((a[i] + noise_diff[i]) / cfg.tau);
    ds_da[i] = s[i] * (1.0 - s[i]) / cfg.tau;
    z[i] = s[i] >= 0.5 ? 1 : 0;
    wx[i] = dot(params.predictor.w, ex.features.row(i));
  }

  Vector da(d, 0.0);  // dLoss/da_i accumulated across terms

  // Cross-entropy on the soft-sample prediction.
  double soft_score = params.predictor.b;
  for (std::size_t i = 0; i < d; ++i) soft_score += s[i] * wx[i] / dd;
  const double f = sigmoid(soft_score);
  const double ce = -(y * std::log(f) + (1.0 - y) * std::log1p(-f));
  const double dscore = f - y;
  if (grads) {
    for (std::size_t i = 0; i < d; ++i) {
      const double coef = dscore * s[i] / dd;
      const auto row = ex.features.row(i);
      for (std::size_t c = 0; c < m; ++c) grads->predictor_w[c] += coef * row[c];
      da[i] += dscore * wx[i] / dd * ds_da[i];
    }
    grads->predictor_b += dscore;
  }

  // Rate-targeted sparsity: mean_i KL(Bern(p_i) || Bern(pi0)).
  const double logit_pi0 = logit(cfg.pi0);
  double delta = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    delta += p[i] * std::log(p[i] / cfg.pi0) +
             (1.0 - p[i]) * std::log((1.0 - p[i]) / (1.0 - cfg.pi0));
  }
  delta /= dd;
  if (grads) {
    for (std::size_t i = 0; i < d; ++i) {
      da[i] += cfg.lambda * (a[i] - logit_pi0) * p[i] * (1.0 - p[i]) / dd;
    }
  }

  // Causality constraint on the (hard or relaxed) mask.
  double causality = 0.0;
  if (cfg.mu > 0.0 && !flip_subset.empty()) {
    Vector mask(d);
    for (std::size_t i = 0; i < d; ++i) mask[i] = relaxed ? s[i] : static_cast<double>(z[i]);
    double keep_score = params.predictor.b;
    for (std::size_t i = 0; i < d; ++i) keep_score += mask[i] * wx[i] / dd;
    const double f_keep = sigmoid(keep_score);
    const double p_keep = y == 1.0 ? f_keep : 1.0 - f_keep;
    const double fk_slope = f_keep * (1.0 - f_keep);
    const double r_size = static_cast<double>(flip_subset.size());

    double keep_vec_coef = 0.0;   // multiplier of the pooled keep vector in dw_p
    double mask_common = 0.0;     // shared dLoss/dmask_i coefficient (times wx_i)
    for (int j : flip_subset) {
      const std::size_t ji = static_cast<std::size_t>(j);
      const double flip_delta = (1.0 - 2.0 * mask[ji]) / dd;
      const double f_flip = sigmoid(keep_score + flip_delta * wx[ji]);
      const double p_flip = y == 1.0 ? f_flip : 1.0 - f_flip;
      const double diff = p_keep - p_flip;
      const double lb = std::max(0.0, diff);
      causality += -std::log(lb + cfg.c) / r_size;
      if (grads && diff > 0.0) {
        const double coef = -cfg.mu / (r_size * (lb + cfg.c));
        const double ff_slope = f_flip * (1.0 - f_flip);
        keep_vec_coef += coef * sgn * (fk_slope - ff_slope);
        grads->predictor_b += coef * sgn * (fk_slope - ff_slope);
        mask_common += coef * sgn * (fk_slope - ff_slope) / dd;
        // The flipped pooled vector differs from the keep vector by
        // flip_delta * x_j, and u_flip moves opposite to mask_j.
        const double extra = -coef * sgn * ff_slope * flip_delta;
        const auto row = ex.features.row(ji);
        for (std::size_t c = 0; c < m; ++c) grads->predictor_w[c] += extra * row[c];
        da[ji] += coef * sgn * 2.0 * ff_slope * wx[ji] / dd * ds_da[ji];
      }
    }
    if (grads) {
      for (std::size_t i = 0; i < d; ++i) {
        const double coef = keep_vec_coef * mask[i] / dd;
        const auto row = ex.features.row(i);
        for (std::size_t c = 0; c < m; ++c) grads->predictor_w[c] += coef * row[c];
        da[i] += mask_common * wx[i] * ds_da[i];
      }
    }
  }

  if (grads) {
    for (std::size_t i = 0; i < d; ++i) {
      if (da[i] == 0.0) continue;
      const auto row = ex.features.row(i);
      for (std::size_t c = 0; c < m; ++c) grads->selector_w[c] += da[i] * row[c];
      grads->selector_b += da[i];
    }
  }

  LossComponents comps;
  comps.ce = ce;
  comps.sparsity = cfg.lambda * delta;
  comps.causality = cfg.mu * causality;
  comps.total = comps.ce + comps.sparsity + comps.causality;
  return comps;
}

ObjectiveResult objective(const SyntheticDataset& ds,
                          std::span<const std::size_t> batch,
                          const ModelParams& params, const TrainConfig& cfg,
                          const Rng& rng) {
  if (batch.empty()) throw std::invalid_argument("objective: empty batch");
  const std::size_t m = params.selector.w.size();
  ObjectiveResult res;
  res.grads.selector_w.assign(m, 0.0);
  res.grads.predictor_w.assign(m, 0.0);

  ModelGrads ex_grads;
  for (std::size_t idx : batch) {
    const Example& ex = ds.examples.at(idx);
    const std::size_t d = ex.features.rows;
    Rng ex_rng = rng.split(idx);
    Vector noise(d);
    for (auto& v : noise) v = ex_rng.next_gumbel() - ex_rng.next_gumbel();

    std::vector<int> subset;
    if (cfg.mu > 0.0) {
      std::vector<std::uint8_t> z(d);
      for (std::size_t i = 0; i < d; ++i) {
        const double a = dot(params.selector.w, ex.features.row(i)) + params.selector.b;
        z[i] = sigmoid((a + noise[i]) / cfg.tau) >= 0.5 ? 1 : 0;
      }
      subset = sample_flip_subset(z, cfg.k_pct, ex_rng);
      if (subset.empty()) ++res.empty_selections;
    }

    ex_grads.selector_w.assign(m, 0.0);
    ex_grads.predictor_w.assign(m, 0.0);
    ex_grads.selector_b = 0.0;
    ex_grads.predictor_b = 0.0;
    const LossComponents comps =
        example_objective(params, ex, noise, subset, cfg, /*relaxed=*/false, &ex_grads);

    res.components.ce += comps.ce;
    res.components.sparsity += comps.sparsity;
    res.components.causality += comps.causality;
    for (std::size_t c = 0; c < m; ++c) {
      res.grads.selector_w[c] += ex_grads.selector_w[c];
      res.grads.predictor_w[c] += ex_grads.predictor_w[c];
    }
    res.grads.selector_b += ex_grads.selector_b;
    res.grads.predictor_b += ex_grads.predictor_b;
  }

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  res.components.ce *= inv_n;
  res.components.sparsity *= inv_n;
  res.components.causality *= inv_n;
  res.components.total =
      res.components.ce + res.components.sparsity + res.components.causality;
  for (std::size_t c = 0; c < m; ++c) {
    res.grads.selector_w[c] *= inv_n;
    res.grads.predictor_w[c] *= inv_n;
  }
  res.grads.selector_b *= inv_n;
  res.grads.predictor_b *= inv_n;
  return res;
}

TrainReport fit(const SyntheticDataset& train_ds, const SyntheticDataset& val_ds,
                const TrainConfig& cfg) {
  cfg.validate();
  if (train_ds.examples.empty() || val_ds.examples.empty()) {
    throw std::invalid_argument("fit: datasets must be non-empty");
  }
  const std::size_t n = train_ds.size();
  const std::size_t m = train_ds.examples[0].features.cols;

  TrainReport report;
  ModelParams params = init_params(m);
  const Rng root(cfg.seed);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng epoch_rng = root.split(epoch);
    const std::vector<std::size_t> perm = epoch_rng.permutation(n);

    double ce = 0.0, sparsity = 0.0, causality = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++steps) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      const std::span<const std::size_t> batch(perm.data() + start, len);
      const Rng step_rng = epoch_rng.split(0x10000000ull + steps);
      const ObjectiveResult r = objective(train_ds, batch, params, cfg, step_rng);
      if (!std::isfinite(r.components.total)) {
        std::ostringstream msg;
        msg << "divergence at epoch " << epoch << " step " << steps
            << ": ce=" << r.components.ce << " sparsity=" << r.components.sparsity
            << " causality=" << r.components.causality;
        throw DivergenceError(msg.str());
      }
      report.empty_selection_events += r.empty_selections;

      for (std::size_t c = 0; c < m; ++c) {
        params.selector.w[c] -= cfg.lr * r.grads.selector_w[c];
        params.predictor.w[c] -= cfg.lr * r.grads.predictor_w[c];
      }
      params.selector.b -= cfg.lr * r.grads.selector_b;
      params.predictor.b -= cfg.lr * r.grads.predictor_b;

      const double w = static_cast<double>(len) / static_cast<double>(n);
      ce += w * r.components.ce;
      sparsity += w * r.components.sparsity;
      causality += w * r.components.causality;
    }

    const Metrics val = evaluate(params.selector, params.predictor, val_ds, cfg.eval_k_pct);
    EpochRow row;
    row.epoch = epoch;
    row.ce = ce;
    row.sparsity = sparsity;
    row.causality = causality;
    row.val_acc = val.acc;
    row.val_f1 = val.f1;
    row.val_cpns_lb = val.avg_cpns_lb;
    report.epochs.push_back(row);
  }
  report.params = std::move(params);
  return report;
}

std::vector<std::vector<int>> all_nonempty_subsets(std::size_t d) {
  std::vector<std::vector<int>> subsets;
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    std::vector<int> s;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask & (1u << i)) s.push_back(static_cast<int>(i));
    }
    subsets.push_back(std::move(s));
  }
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return subsets;
}

namespace {

Matrix flatten_scalar_tokens(const SyntheticDataset& ds) {
  if (ds.examples.empty()) throw std::invalid_argument("subset scan: empty dataset");
  const std::size_t d = ds.examples[0].features.rows;
  Matrix X(ds.size(), d);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Example& ex = ds.examples[i];
    if (ex.features.cols != 1 || ex.features.rows != d) {
      throw std::invalid_argument("subset scan requires one scalar feature per token");
    }
    for (std::size_t j = 0; j < d; ++j) X.at(i, j) = ex.features.at(j, 0);
  }
  return X;
}

}  // namespace

std::vector<SubsetScanRow> cpns_subset_scan(
    const SyntheticDataset& train, const SyntheticDataset& eval_split,
    const std::vector<std::vector<int>>& subsets,
    const LogisticFitConfig& fit_cfg) {
  const Matrix Xtr = flatten_scalar_tokens(train);
  const Matrix Xev = flatten_scalar_tokens(eval_split);
  check_same_size(Xtr.cols, Xev.cols, "subset scan feature count");
  const std::size_t d = Xtr.cols;

  std::vector<int> ytr(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) ytr[i] = train.examples[i].label;

  std::vector<SubsetScanRow> rows;
  for (const auto& subset : subsets) {
    if (subset.empty()) throw std::invalid_argument("subset scan: empty rationale set");
    std::vector<std::uint8_t> col_mask(d, 0);
    for (int j : subset) {
      if (j < 0 || static_cast<std::size_t>(j) >= d) {
        throw std::invalid_argument("subset scan: feature index out of range");
      }
      col_mask[static_cast<std::size_t>(j)] = 1;
      double mean = 0.0, var = 0.0;
      for (std::size_t i = 0; i < Xtr.rows; ++i) mean += Xtr.at(i, static_cast<std::size_t>(j));
      mean /= static_cast<double>(Xtr.rows);
      for (std::size_t i = 0; i < Xtr.rows; ++i) {
        const double c = Xtr.at(i, static_cast<std::size_t>(j)) - mean;
        var += c * c;
      }
      if (var == 0.0) throw std::invalid_argument("subset scan: degenerate (constant) feature");
    }

    const LogisticModel model = fit_logistic(Xtr, ytr, col_mask, fit_cfg);

    std::size_t correct = 0;
    double score_sum = 0.0;
    Vector row_buf(d);
    for (std::size_t i = 0; i < Xev.rows; ++i) {
      for (std::size_t c = 0; c < d; ++c) row_buf[c] = col_mask[c] ? Xev.at(i, c) : 0.0;
      const int y = eval_split.examples[i].label;
      const double p1 = model.predict_prob(row_buf);
      if ((p1 >= 0.5 ? 1 : 0) == y) ++correct;
      const double p_keep = y == 1 ? p1 : 1.0 - p1;
      double lb_sum = 0.0;
      for (int j : subset) {
        const double saved = row_buf[static_cast<std::size_t>(j)];
        row_buf[static_cast<std::size_t>(j)] = 0.0;
        const double pf1 = model.predict_prob(row_buf);
        row_buf[static_cast<std::size_t>(j)] = saved;
        const double p_flip = y == 1 ? pf1 : 1.0 - pf1;
        lb_sum += cpns_j_lower_bound(p_keep, p_flip);
      }
      score_sum += lb_sum / static_cast<double>(d);
    }

    SubsetScanRow row;
    row.subset = subset;
    row.avg_cpns_lb = score_sum / static_cast<double>(Xev.rows);
    row.accuracy = static_cast<double>(correct) / static_cast<double>(Xev.rows);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace crat
