#include "crat/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace crat {

std::string split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kTestIn: return "test_in";
    case Split::kTestOut: return "test_out";
  }
  return "unknown";
}

namespace {

struct Chol2 {
  double l00, l10, l11;
};

Chol2 cholesky2(double c00, double c01, double c11) {
  if (c00 <= 0.0) throw std::invalid_argument("covariance not positive definite");
  const double l00 = std::sqrt(c00);
  const double l10 = c01 / l00;
  const double rem = c11 - l10 * l10;
  if (rem <= 0.0) throw std::invalid_argument("covariance not positive definite");
  return {l00, l10, std::sqrt(rem)};
}

}  // namespace

SyntheticDataset gen_toy_dataset(const ToyConfig& cfg, Split split, Rng& rng) {
  if (cfg.n < 1) throw std::invalid_argument("gen_toy_dataset: n must be >= 1");
  const bool ood = split == Split::kTestOut;
  const Chol2 L = ood ? cholesky2(cfg.cov_ood_00, cfg.cov_ood_01, cfg.cov_ood_11)
                      : cholesky2(1.0, cfg.rho_train, 1.0);

  SyntheticDataset ds;
  ds.split = split_name(split);
  ds.examples.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const double z1 = rng.next_gaussian();
    const double z2 = rng.next_gaussian();
    const double x1 = L.l00 * z1;
    const double x2 = L.l10 * z1 + L.l11 * z2;
    const double x3 = x1 + cfg.eps_sd * rng.next_gaussian();

    Example ex;
    ex.features = Matrix(3, 1);
    ex.features.at(0, 0) = x1;
    ex.features.at(1, 0) = x2;
    ex.features.at(2, 0) = x3;
    const double pi = sigmoid(cfg.beta0 + cfg.beta1 * x1 + cfg.beta2 * x2);
    ex.label = pi >= 0.5 ? 1 : 0;
    ex.true_mask = {1, 1, 0};
    ex.spurious_mask = {0, 0, 1};
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

SyntheticDataset gen_token_dataset(const TokenConfig& cfg, Rng& rng) {
  if (cfg.seq_len < 4) throw std::invalid_argument("gen_token_dataset: seq_len must be >= 4");
  if (cfg.cause_tokens.empty()) throw std::invalid_argument("gen_token_dataset: no cause tokens");
  if (cfg.cause_tokens.size() != cfg.cause_weights.size()) {
    throw std::invalid_argument("gen_token_dataset: cause_tokens/cause_weights size mismatch");
  }
  // Reserved shortcut ids plus at least one filler id must fit.
  const int first_filler = 2 + static_cast<int>(cfg.cause_tokens.size());
  if (cfg.vocab_size <= static_cast<std::size_t>(first_filler)) {
    throw std::invalid_argument("gen_token_dataset: vocab too small for cause set");
  }
  for (int t : cfg.cause_tokens) {
    if (t < 2 || t >= static_cast<int>(cfg.vocab_size)) {
      throw std::invalid_argument("gen_token_dataset: cause token id out of range");
    }
  }

  const std::size_t n_filler = cfg.vocab_size - first_filler;
  SyntheticDataset ds;
  ds.split = "train";
  ds.examples.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    std::vector<int> tokens(cfg.seq_len);
    for (std::size_t p = 0; p < cfg.seq_len; ++p) {
      tokens[p] = first_filler + static_cast<int>(rng.next_below(n_filler));
    }
    const std::size_t n_plant = 1 + rng.next_below(3);
    std::vector<std::size_t> order = rng.permutation(cfg.seq_len);
    double score = cfg.score_bias;
    Example ex;
    ex.true_mask.assign(cfg.seq_len, 0);
    ex.spurious_mask.assign(cfg.seq_len, 0);
    for (std::size_t k = 0; k < n_plant; ++k) {
      const std::size_t pos = order[k];
      const std::size_t which = rng.next_below(cfg.cause_tokens.size());
      tokens[pos] = cfg.cause_tokens[which];
      ex.true_mask[pos] = 1;
      score += cfg.cause_weights[which];
    }
    ex.label = sigmoid(score) >= 0.5 ? 1 : 0;
    ex.features = Matrix(cfg.seq_len, cfg.vocab_size);
    for (std::size_t p = 0; p < cfg.seq_len; ++p) {
      ex.features.at(p, static_cast<std::size_t>(tokens[p])) = 1.0;
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

SyntheticDataset inject_spurious(const SyntheticDataset& ds, double alpha1,
                                 Rng& rng) {
  if (alpha1 < 0.0 || alpha1 > 1.0) {
    throw std::invalid_argument("inject_spurious: alpha1 must be in [0,1]");
  }
  SyntheticDataset out;
  out.split = ds.split;
  out.config_hash = ds.config_hash;
  out.examples.reserve(ds.size());
  for (const Example& ex : ds.examples) {
    const std::size_t d = ex.features.rows;
    const std::size_t m = ex.features.cols;
    if (m < 2) throw std::invalid_argument("inject_spurious: features must be one-hot with >= 2 columns");
    const double u = rng.next_double();
    int tok;
    if (ex.label == 1) {
      tok = u < alpha1 ? kShortcutTokenA : kShortcutTokenB;
    } else {
      tok = u < alpha1 ? kShortcutTokenB : kShortcutTokenA;
    }

    Example ne;
    ne.label = ex.label;
    ne.features = Matrix(d + 1, m);
    ne.features.at(0, static_cast<std::size_t>(tok)) = 1.0;
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        ne.features.at(r + 1, c) = ex.features.at(r, c);
      }
    }
    ne.true_mask.assign(d + 1, 0);
    ne.spurious_mask.assign(d + 1, 0);
    ne.spurious_mask[0] = 1;
    for (std::size_t r = 0; r < d; ++r) {
      ne.true_mask[r + 1] = ex.true_mask[r];
      ne.spurious_mask[r + 1] = ex.spurious_mask[r];
    }
    out.examples.push_back(std::move(ne));
  }
  return out;
}

void save_dataset(const SyntheticDataset& ds, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  for (const Example& ex : ds.examples) {
    nlohmann::json j;
    std::vector<std::vector<double>> feats(ex.features.rows);
    for (std::size_t r = 0; r < ex.features.rows; ++r) {
      feats[r].assign(ex.features.row(r).begin(), ex.features.row(r).end());
    }
    j["features"] = feats;
    j["label"] = ex.label;
    j["true_mask"] = ex.true_mask;
    j["spurious_mask"] = ex.spurious_mask;
    f << j.dump() << '\n';
  }
}

SyntheticDataset load_dataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  SyntheticDataset ds;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    Example ex;
    const auto& feats = j.at("features");
    const std::size_t d = feats.size();
    const std::size_t m = d > 0 ? feats[0].size() : 0;
    ex.features = Matrix(d, m);
    for (std::size_t r = 0; r < d; ++r) {
      if (feats[r].size() != m) throw std::runtime_error("ragged feature rows in " + path);
      for (std::size_t c = 0; c < m; ++c) ex.features.at(r, c) = feats[r][c].get<double>();
    }
    ex.label = j.at("label").get<int>();
    ex.true_mask = j.at("true_mask").get<std::vector<std::uint8_t>>();
    ex.spurious_mask = j.at("spurious_mask").get<std::vector<std::uint8_t>>();
    if (ex.true_mask.size() != d || ex.spurious_mask.size() != d) {
      throw std::runtime_error("mask length mismatch in " + path);
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace crat
