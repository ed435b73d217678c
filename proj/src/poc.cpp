#include "crat/poc.hpp"

#include <cmath>
#include <stdexcept>

namespace crat {
namespace {

void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
  }
}

// Sums and ratios of nonnegative masses can overshoot the unit interval by
// an ulp; snap them back.
double clamp_unit(double v) { return std::min(1.0, std::max(0.0, v)); }

std::uint32_t to_mask(const std::vector<int>& z) {
  if (z.size() > 31) throw std::invalid_argument("selection vector too long");
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] != 0 && z[i] != 1) throw std::invalid_argument("selection vector must be binary");
    if (z[i]) m |= 1u << i;
  }
  return m;
}

int resolve_x(const DiscreteScm& scm, const std::vector<int>& x) {
  const int x_id = scm.x_id_of(x);
  if (x_id < 0 || scm.prob_x(x_id) <= 0.0) {
    throw std::invalid_argument("oracle: P(X=x) = 0 under the SCM");
  }
  return x_id;
}

// P(Z = z | X = x) by enumerating N_Z.
double prob_z_given_x(const DiscreteScm& scm, int x_id, std::uint32_t z) {
  double total = 0.0;
  for (std::size_t nz = 0; nz < scm.p_nz.size(); ++nz) {
    if (scm.g_table[static_cast<std::size_t>(x_id)][nz] == z) total += scm.p_nz[nz];
  }
  return total;
}

// P over N_Y of { h(z*x, n_y) = y }.
double prob_y_under_do_z(const DiscreteScm& scm, int x_id, std::uint32_t z, int y) {
  double total = 0.0;
  for (std::size_t ny = 0; ny < scm.p_ny.size(); ++ny) {
    if (scm.eval_h(x_id, z, ny) == y) total += scm.p_ny[ny];
  }
  return total;
}

}  // namespace

double cpns_j_identified(double p_keep, double p_flip) {
  check_unit_interval(p_keep, "p_keep");
  check_unit_interval(p_flip, "p_flip");
  return p_keep - p_flip;
}

double cpns_j_lower_bound(double p_keep, double p_flip) {
  return std::max(0.0, cpns_j_identified(p_keep, p_flip));
}

double aggregate_cpns(const Vector& lower_bounds, const std::vector<int>& rationale_set) {
  if (rationale_set.empty()) throw std::invalid_argument("empty rationale set");
  check_same_size(lower_bounds.size(), rationale_set.size(), "aggregate_cpns");
  double log_sum = 0.0;
  for (double v : lower_bounds) {
    check_unit_interval(v, "lower bound");
    if (v == 0.0) return 0.0;
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(lower_bounds.size()));
}

std::optional<double> scm_conditional_prob_y(const DiscreteScm& scm,
                                             const std::vector<int>& x,
                                             const std::vector<int>& z, int y) {
  const int x_id = resolve_x(scm, x);
  const std::uint32_t zm = to_mask(z);
  // Joint enumeration over (n_z, n_y); the denominator is the selection event.
  double num = 0.0, den = 0.0;
  for (std::size_t nz = 0; nz < scm.p_nz.size(); ++nz) {
    if (scm.g_table[static_cast<std::size_t>(x_id)][nz] != zm) continue;
    den += scm.p_nz[nz];
    for (std::size_t ny = 0; ny < scm.p_ny.size(); ++ny) {
      if (scm.eval_h(x_id, zm, ny) == y) num += scm.p_nz[nz] * scm.p_ny[ny];
    }
  }
  if (den <= 0.0) return std::nullopt;
  return clamp_unit(num / den);
}

double oracle_cpns_j(const DiscreteScm& scm, const std::vector<int>& x,
                     const std::vector<int>& z, int j, int y) {
  const int x_id = resolve_x(scm, x);
  const std::uint32_t zm = to_mask(z);
  if (j < 0 || j >= scm.d) throw std::invalid_argument("oracle_cpns_j: index out of range");
  const std::uint32_t zf = zm ^ (1u << j);
  double total = 0.0;
  for (std::size_t ny = 0; ny < scm.p_ny.size(); ++ny) {
    if (scm.eval_h(x_id, zm, ny) == y && scm.eval_h(x_id, zf, ny) != y) {
      total += scm.p_ny[ny];
    }
  }
  return clamp_unit(total);
}

double oracle_ps(const DiscreteScm& scm, const std::vector<int>& x,
                 const std::vector<int>& z, int y) {
  const int x_id = resolve_x(scm, x);
  const std::uint32_t zm = to_mask(z);
  // Condition on the factual event {Z != z, Y != y}; the counterfactual
  // intervention is the concrete vector z.
  double num = 0.0, den = 0.0;
  for (std::size_t nz = 0; nz < scm.p_nz.size(); ++nz) {
    const std::uint32_t zobs = scm.g_table[static_cast<std::size_t>(x_id)][nz];
    if (zobs == zm) continue;
    for (std::size_t ny = 0; ny < scm.p_ny.size(); ++ny) {
      if (scm.eval_h(x_id, zobs, ny) == y) continue;  // factual Y != y
      const double w = scm.p_nz[nz] * scm.p_ny[ny];
      den += w;
      if (scm.eval_h(x_id, zm, ny) == y) num += w;
    }
  }
  if (den <= 0.0) throw std::invalid_argument("oracle_ps: conditioning event has zero probability");
  return clamp_unit(num / den);
}

double oracle_pn(const DiscreteScm& scm, const std::vector<int>& x,
                 const std::vector<int>& z, int y) {
  const int x_id = resolve_x(scm, x);
  const std::uint32_t zm = to_mask(z);
  const double p_keep_mass = prob_z_given_x(scm, x_id, zm);
  if (p_keep_mass <= 0.0) throw std::invalid_argument("oracle_pn: P(Z=z | X=x) = 0");
  const double p_alt_mass = 1.0 - p_keep_mass;
  if (p_alt_mass <= 0.0) throw std::invalid_argument("oracle_pn: P(Z!=z | X=x) = 0");

  // Factual conditioning {Z=z, Y=y} restricts N_Y; the alternative selection
  // z' is drawn from the SCM's own selection distribution restricted to the
  // complement of z.
  double p_y = 0.0;
  for (std::size_t ny = 0; ny < scm.p_ny.size(); ++ny) {
    if (scm.eval_h(x_id, zm, ny) == y) p_y += scm.p_ny[ny];
  }
  if (p_y <= 0.0) throw std::invalid_argument("oracle_pn: P(Y=y | Z=z, X=x) = 0");

  double total = 0.0;
  for (std::size_t nz = 0; nz < scm.p_nz.size(); ++nz) {
    const std::uint32_t zalt = scm.g_table[static_cast<std::size_t>(x_id)][nz];
    if (zalt == zm) continue;
    double joint = 0.0;  // mass over N_Y of factual y and counterfactual not-y
    for (std::size_t ny = 0; ny < scm.p_ny.size(); ++ny) {
      if (scm.eval_h(x_id, zm, ny) == y && scm.eval_h(x_id, zalt, ny) != y) {
        joint += scm.p_ny[ny];
      }
    }
    total += (scm.p_nz[nz] / p_alt_mass) * (joint / p_y);
  }
  return clamp_unit(total);
}

double oracle_pns(const DiscreteScm& scm, const std::vector<int>& x,
                  const std::vector<int>& z, int y) {
  const int x_id = resolve_x(scm, x);
  const std::uint32_t zm = to_mask(z);
  const double p_alt_mass = 1.0 - prob_z_given_x(scm, x_id, zm);
  if (p_alt_mass <= 0.0) throw std::invalid_argument("oracle_pns: P(Z!=z | X=x) = 0");

  double total = 0.0;
  for (std::size_t nz = 0; nz < scm.p_nz.size(); ++nz) {
    const std::uint32_t zalt = scm.g_table[static_cast<std::size_t>(x_id)][nz];
    if (zalt == zm) continue;
    double joint = 0.0;
    for (std::size_t ny = 0; ny < scm.p_ny.size(); ++ny) {
      if (scm.eval_h(x_id, zm, ny) == y && scm.eval_h(x_id, zalt, ny) != y) {
        joint += scm.p_ny[ny];
      }
    }
    total += (scm.p_nz[nz] / p_alt_mass) * joint;
  }
  return clamp_unit(total);
}

bool check_monotonicity(const DiscreteScm& scm, const std::vector<int>& x,
                        const std::vector<int>& z, int j, int y) {
  const int x_id = resolve_x(scm, x);
  const std::uint32_t zm = to_mask(z);
  if (j < 0 || j >= scm.d) throw std::invalid_argument("check_monotonicity: index out of range");
  const std::uint32_t zf = zm ^ (1u << j);
  for (std::size_t ny = 0; ny < scm.p_ny.size(); ++ny) {
    if (scm.p_ny[ny] <= 0.0) continue;
    if (scm.eval_h(x_id, zf, ny) == y && scm.eval_h(x_id, zm, ny) != y) {
      return false;
    }
  }
  return true;
}

double recompute_expectation(const DiscreteScm& scm, const OracleExpectation& e) {
  const std::vector<int>& x = scm.x_values.at(static_cast<std::size_t>(e.x_id));
  std::vector<int> z(static_cast<std::size_t>(scm.d));
  for (int i = 0; i < scm.d; ++i) z[static_cast<std::size_t>(i)] = (e.z >> i) & 1u;
  if (e.kind == "cpns_j") return oracle_cpns_j(scm, x, z, e.j, e.y);
  if (e.kind == "ps") return oracle_ps(scm, x, z, e.y);
  if (e.kind == "pn") return oracle_pn(scm, x, z, e.y);
  if (e.kind == "pns") return oracle_pns(scm, x, z, e.y);
  throw std::invalid_argument("unknown expectation kind: " + e.kind);
}

}  // namespace crat
