#include "crat/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crat {

std::vector<std::uint8_t> select_top_k(const Vector& probs, double k_pct) {
  if (k_pct <= 0.0 || k_pct > 100.0) throw std::invalid_argument("select_top_k: k_pct must be in (0, 100]");
  const std::size_t d = probs.size();
  const std::size_t count = std::min<std::size_t>(
      d, std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                      k_pct / 100.0 * static_cast<double>(d)))));
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  std::vector<std::uint8_t> mask(d, 0);
  for (std::size_t i = 0; i < count; ++i) mask[order[i]] = 1;
  return mask;
}

void PrfCounts::add(const std::vector<std::uint8_t>& pred_mask,
                    const std::vector<std::uint8_t>& true_mask) {
  check_same_size(pred_mask.size(), true_mask.size(), "token_prf masks");
  for (std::size_t i = 0; i < pred_mask.size(); ++i) {
    if (pred_mask[i] && true_mask[i]) ++tp;
    else if (pred_mask[i]) ++fp;
    else if (true_mask[i]) ++fn;
  }
}

PrfResult prf_from_counts(const PrfCounts& c) {
  PrfResult r;
  r.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  r.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  r.f1 = r.precision + r.recall == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

PrfResult token_prf(const std::vector<std::uint8_t>& pred_mask,
                    const std::vector<std::uint8_t>& true_mask) {
  PrfCounts c;
  c.add(pred_mask, true_mask);
  return prf_from_counts(c);
}

double fdr(const std::vector<std::uint8_t>& pred_mask,
           const std::vector<std::uint8_t>& spurious_mask) {
  check_same_size(pred_mask.size(), spurious_mask.size(), "fdr masks");
  std::size_t hit = 0, total = 0;
  for (std::size_t i = 0; i < pred_mask.size(); ++i) {
    if (spurious_mask[i]) {
      ++total;
      if (pred_mask[i]) ++hit;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

namespace {

std::vector<int> selected_indices(const std::vector<std::uint8_t>& mask) {
  std::vector<int> idx;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

}  // namespace

std::map<double, double> cpns_length_sweep(const SelectorParams& selector,
                                           const PredictorParams& predictor,
                                           const SyntheticDataset& ds,
                                           const std::vector<double>& ks) {
  std::map<double, double> out;
  for (double k : ks) {
    double total = 0.0;
    for (const Example& ex : ds.examples) {
      const Vector probs = selector_forward(selector, ex.features);
      const std::vector<std::uint8_t> z = select_top_k(probs, k);
      const std::vector<int> subset = selected_indices(z);
      const CpnsReport report = estimate_cpns(predictor, ex.features, z, subset, ex.label);
      total += report.aggregate_lb;
    }
    out[k] = total / static_cast<double>(ds.size());
  }
  return out;
}

Metrics evaluate(const SelectorParams& selector, const PredictorParams& predictor,
                 const SyntheticDataset& ds, double k_pct) {
  if (ds.examples.empty()) throw std::invalid_argument("evaluate: empty dataset");
  Metrics m;
  m.n_examples = ds.size();
  PrfCounts prf;
  std::size_t correct = 0;
  std::size_t spurious_hit = 0, spurious_total = 0;
  double cpns_total = 0.0;
  for (const Example& ex : ds.examples) {
    const Vector probs = selector_forward(selector, ex.features);
    const std::vector<std::uint8_t> z = select_top_k(probs, k_pct);
    const Vector zf(z.begin(), z.end());
    const double f = predictor_forward(predictor, ex.features, zf);
    if ((f >= 0.5 ? 1 : 0) == ex.label) ++correct;
    prf.add(z, ex.true_mask);
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (ex.spurious_mask[i]) {
        ++spurious_total;
        if (z[i]) ++spurious_hit;
      }
    }
    const CpnsReport report =
        estimate_cpns(predictor, ex.features, z, selected_indices(z), ex.label);
    cpns_total += report.aggregate_lb;
  }
  m.acc = static_cast<double>(correct) / static_cast<double>(ds.size());
  const PrfResult r = prf_from_counts(prf);
  m.precision = r.precision;
  m.recall = r.recall;
  m.f1 = r.f1;
  m.fdr = spurious_total == 0 ? 0.0 : static_cast<double>(spurious_hit) / static_cast<double>(spurious_total);
  m.avg_cpns_lb = cpns_total / static_cast<double>(ds.size());
  return m;
}

}  // namespace crat
