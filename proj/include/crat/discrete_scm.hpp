#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "crat/linalg.hpp"
#include "crat/rng.hpp"

namespace crat {

// Finite structural causal model
//   X = f(N_X),  Z = g(X, N_Z),  Y = h(Z * X, N_Y)
// with tabulated structural functions and finite exogenous domains, small
// enough that every counterfactual can be computed by exact enumeration.
//
// Tokens take values in {0..token_card-1}; selections are d-bit masks
// (bit i = Z_i). h is keyed by the masked vector with entries
// m_i = z_i ? 1 + x_i : 0, so it can only depend on (z * x, n_y).
struct DiscreteScm {
  int d = 0;
  int token_card = 0;
  Vector p_nx, p_nz, p_ny;
  std::vector<std::vector<int>> f_table;           // [n_x] -> token vector
  std::vector<std::vector<std::uint32_t>> g_table; // [x_id][n_z] -> z mask
  std::map<std::vector<int>, std::vector<int>> h_table;  // masked -> y per n_y

  // Derived from f_table by finalize(): the distinct reachable inputs.
  std::vector<std::vector<int>> x_values;
  std::vector<int> x_id_of_nx;

  // Rebuilds derived tables and validates invariants (probabilities sum to 1
  // within 1e-12, tables total over their domains). Throws on violation.
  void finalize();

  int x_id_of(const std::vector<int>& x) const;  // -1 when unreachable
  double prob_x(int x_id) const;
  std::uint32_t num_masks() const { return 1u << d; }
  std::vector<int> masked(int x_id, std::uint32_t z) const;
  int eval_h(int x_id, std::uint32_t z, std::size_t n_y) const;
};

struct ScmGenConfig {
  int d = 3;
  int token_card = 2;
  int nx = 3;
  int nz = 4;
  int ny = 3;
  bool force_monotone = false;  // makes h nondecreasing in every z_i
};

// Random tables under the enumeration budget nx*nz*ny*2^d <= 1e5.
DiscreteScm random_discrete_scm(const ScmGenConfig& cfg, Rng& rng);

// A stored SCM plus expected oracle values (12 significant digits) frozen
// from a past enumeration run.
struct OracleExpectation {
  std::string kind;  // "cpns_j" | "ps" | "pn" | "pns"
  int x_id = 0;
  std::uint32_t z = 0;
  int j = 0;  // unused for ps/pn/pns
  int y = 0;
  double value = 0.0;
};

struct ScmFixture {
  DiscreteScm scm;
  std::vector<OracleExpectation> expects;
};

void save_scm(const DiscreteScm& scm, std::ostream& os);
DiscreteScm load_scm(std::istream& is);
void save_fixture(const ScmFixture& fx, const std::string& path);
ScmFixture load_fixture(const std::string& path);

}  // namespace crat
