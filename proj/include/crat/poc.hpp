#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "crat/discrete_scm.hpp"
#include "crat/linalg.hpp"

namespace crat {

// Identified per-token probability of necessity and sufficiency under
// consistency + ignorability + monotonicity:
//   p_keep - p_flip
// where p_keep = P(Y=y | Z_j=z_j, Z_-j=z_-j, X=x) and p_flip is the same
// probability with z_j flipped.
double cpns_j_identified(double p_keep, double p_flip);

// Without monotonicity only the lower bound max(0, p_keep - p_flip) is valid.
double cpns_j_lower_bound(double p_keep, double p_flip);

// Geometric mean of per-token lower bounds over the rationale index set,
// computed in log space; any exact zero short-circuits to zero. Throws on an
// empty rationale set.
double aggregate_cpns(const Vector& lower_bounds, const std::vector<int>& rationale_set);

struct CpnsReport {
  struct TokenEntry {
    std::optional<double> identified;  // absent when conditioning is undefined
    double lower_bound = 0.0;
  };
  std::map<int, TokenEntry> per_token;
  std::vector<int> rationale_set;
  double aggregate_lb = 0.0;
  // Per-token lower bounds summed over the rationale set and normalized by
  // the sequence length; the additive companion score used by the subset
  // ranking experiment.
  double additive_score = 0.0;
};

// ---- exact oracles on enumerable SCMs -------------------------------------
// All oracles condition on X = x and throw when P(X=x) = 0 or when a
// conditioning event required by the definition has zero probability.
// x is a token-value vector, z a binary selection vector, both of length d.

// P(Y=y | Z=z, X=x) by world enumeration; nullopt when P(Z=z | X=x) = 0.
std::optional<double> scm_conditional_prob_y(const DiscreteScm& scm,
                                             const std::vector<int>& x,
                                             const std::vector<int>& z, int y);

// P( Y(Z_j=z_j, Z_-j=z_-j) = y  AND  Y(Z_j!=z_j, Z_-j=z_-j) != y | X=x ).
double oracle_cpns_j(const DiscreteScm& scm, const std::vector<int>& x,
                     const std::vector<int>& z, int j, int y);

// PS = P(Y(Z=z)=y | Z != z, Y != y, X=x).
double oracle_ps(const DiscreteScm& scm, const std::vector<int>& x,
                 const std::vector<int>& z, int y);

// PN = P(Y(Z!=z)!=y | Z=z, Y=y, X=x). The composite intervention "Z != z"
// mixes over alternative selections z' with weights P(Z=z'|X=x)/P(Z!=z|X=x).
double oracle_pn(const DiscreteScm& scm, const std::vector<int>& x,
                 const std::vector<int>& z, int y);

// PNS = P(Y(Z!=z)!=y, Y(Z=z)=y | X=x), same mixture convention as PN.
double oracle_pns(const DiscreteScm& scm, const std::vector<int>& x,
                  const std::vector<int>& z, int y);

// True iff no exogenous world consistent with X=x realizes
// Y(Z_j!=z_j, Z_-j=z_-j)=y together with Y(Z_j=z_j, Z_-j=z_-j)!=y.
bool check_monotonicity(const DiscreteScm& scm, const std::vector<int>& x,
                        const std::vector<int>& z, int j, int y);

// Convenience for fixture verification: recomputes one stored expectation.
double recompute_expectation(const DiscreteScm& scm, const OracleExpectation& e);

}  // namespace crat
