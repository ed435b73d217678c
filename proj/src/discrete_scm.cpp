#include "crat/discrete_scm.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace crat {
namespace {

void check_dist(const Vector& p, const std::string& name) {
  if (p.empty()) throw std::invalid_argument(name + " is empty");
  double total = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::invalid_argument(name + " has a negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument(name + " does not sum to 1");
  }
}

Vector random_dist(std::size_t n, Rng& rng) {
  Vector p(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = 0.05 + rng.next_double();
    total += p[i];
  }
  for (std::size_t i = 0; i < n; ++i) p[i] /= total;
  return p;
}

}  // namespace

void DiscreteScm::finalize() {
  check_dist(p_nx, "p_nx");
  check_dist(p_nz, "p_nz");
  check_dist(p_ny, "p_ny");
  if (f_table.size() != p_nx.size()) throw std::invalid_argument("f table not total over N_X");

  x_values.clear();
  x_id_of_nx.assign(f_table.size(), -1);
  for (std::size_t nx = 0; nx < f_table.size(); ++nx) {
    const std::vector<int>& x = f_table[nx];
    if (static_cast<int>(x.size()) != d) throw std::invalid_argument("f output has wrong length");
    for (int v : x) {
      if (v < 0 || v >= token_card) throw std::invalid_argument("f output value out of range");
    }
    int id = x_id_of(x);
    if (id < 0) {
      id = static_cast<int>(x_values.size());
      x_values.push_back(x);
    }
    x_id_of_nx[nx] = id;
  }

  if (g_table.size() != x_values.size()) throw std::invalid_argument("g table not total over range(f)");
  for (const auto& row : g_table) {
    if (row.size() != p_nz.size()) throw std::invalid_argument("g table not total over N_Z");
    for (std::uint32_t z : row) {
      if (z >= num_masks()) throw std::invalid_argument("g output mask out of range");
    }
  }

  for (std::size_t xi = 0; xi < x_values.size(); ++xi) {
    for (std::uint32_t z = 0; z < num_masks(); ++z) {
      const auto it = h_table.find(masked(static_cast<int>(xi), z));
      if (it == h_table.end()) throw std::invalid_argument("h table not total over masked inputs");
      if (it->second.size() != p_ny.size()) throw std::invalid_argument("h table not total over N_Y");
      for (int y : it->second) {
        if (y != 0 && y != 1) throw std::invalid_argument("h output must be binary");
      }
    }
  }
}

int DiscreteScm::x_id_of(const std::vector<int>& x) const {
  for (std::size_t i = 0; i < x_values.size(); ++i) {
    if (x_values[i] == x) return static_cast<int>(i);
  }
  return -1;
}

double DiscreteScm::prob_x(int x_id) const {
  double total = 0.0;
  for (std::size_t nx = 0; nx < p_nx.size(); ++nx) {
    if (x_id_of_nx[nx] == x_id) total += p_nx[nx];
  }
  return total;
}

std::vector<int> DiscreteScm::masked(int x_id, std::uint32_t z) const {
  const std::vector<int>& x = x_values[static_cast<std::size_t>(x_id)];
  std::vector<int> m(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    m[static_cast<std::size_t>(i)] = (z >> i) & 1u ? 1 + x[static_cast<std::size_t>(i)] : 0;
  }
  return m;
}

int DiscreteScm::eval_h(int x_id, std::uint32_t z, std::size_t n_y) const {
  return h_table.at(masked(x_id, z))[n_y];
}

DiscreteScm random_discrete_scm(const ScmGenConfig& cfg, Rng& rng) {
  if (cfg.d < 1 || cfg.d > 6) throw std::invalid_argument("random_discrete_scm: d must be in [1,6]");
  if (cfg.token_card < 1 || cfg.token_card > 4 || cfg.nx < 1 || cfg.nx > 4 ||
      cfg.nz < 1 || cfg.nz > 4 || cfg.ny < 1 || cfg.ny > 4) {
    throw std::invalid_argument("random_discrete_scm: domain sizes must be in [1,4]");
  }
  const double worlds = static_cast<double>(cfg.nx) * cfg.nz * cfg.ny * std::pow(2.0, cfg.d);
  if (worlds > 1e5) throw std::invalid_argument("random_discrete_scm: enumeration budget exceeded");

  DiscreteScm scm;
  scm.d = cfg.d;
  scm.token_card = cfg.token_card;
  scm.p_nx = random_dist(static_cast<std::size_t>(cfg.nx), rng);
  scm.p_nz = random_dist(static_cast<std::size_t>(cfg.nz), rng);
  scm.p_ny = random_dist(static_cast<std::size_t>(cfg.ny), rng);

  scm.f_table.resize(static_cast<std::size_t>(cfg.nx));
  for (auto& x : scm.f_table) {
    x.resize(static_cast<std::size_t>(cfg.d));
    for (int i = 0; i < cfg.d; ++i) {
      x[static_cast<std::size_t>(i)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.token_card)));
    }
  }

  // Distinct inputs reachable through f.
  std::vector<std::vector<int>> xs;
  for (const auto& x : scm.f_table) {
    bool seen = false;
    for (const auto& p : xs) {
      if (p == x) { seen = true; break; }
    }
    if (!seen) xs.push_back(x);
  }

  scm.g_table.resize(xs.size());
  for (auto& row : scm.g_table) {
    row.resize(static_cast<std::size_t>(cfg.nz));
    for (auto& z : row) z = static_cast<std::uint32_t>(rng.next_below(1ull << cfg.d));
  }

  // Monotone h: threshold over nonnegative per-(position, token) weights, so
  // selecting more tokens can only push Y upward.
  std::vector<Vector> omega;
  Vector thresholds;
  if (cfg.force_monotone) {
    omega.resize(static_cast<std::size_t>(cfg.d));
    double max_total = 0.0;
    for (auto& row : omega) {
      row.resize(static_cast<std::size_t>(cfg.token_card));
      double row_max = 0.0;
      for (auto& w : row) {
        w = rng.next_double();
        row_max = std::max(row_max, w);
      }
      max_total += row_max;
    }
    thresholds.resize(static_cast<std::size_t>(cfg.ny));
    for (auto& t : thresholds) t = (0.15 + 0.7 * rng.next_double()) * max_total;
  }

  const std::uint32_t masks = 1u << cfg.d;
  for (std::size_t xi = 0; xi < xs.size(); ++xi) {
    for (std::uint32_t z = 0; z < masks; ++z) {
      std::vector<int> m(static_cast<std::size_t>(cfg.d));
      for (int i = 0; i < cfg.d; ++i) {
        m[static_cast<std::size_t>(i)] = (z >> i) & 1u ? 1 + xs[xi][static_cast<std::size_t>(i)] : 0;
      }
      if (scm.h_table.count(m)) continue;
      std::vector<int> ys(static_cast<std::size_t>(cfg.ny));
      if (cfg.force_monotone) {
        double score = 0.0;
        for (int i = 0; i < cfg.d; ++i) {
          const int mi = m[static_cast<std::size_t>(i)];
          if (mi > 0) score += omega[static_cast<std::size_t>(i)][static_cast<std::size_t>(mi - 1)];
        }
        for (int ny = 0; ny < cfg.ny; ++ny) {
          ys[static_cast<std::size_t>(ny)] = score >= thresholds[static_cast<std::size_t>(ny)] ? 1 : 0;
        }
      } else {
        for (int ny = 0; ny < cfg.ny; ++ny) {
          ys[static_cast<std::size_t>(ny)] = static_cast<int>(rng.next_u64() & 1u);
        }
      }
      scm.h_table.emplace(std::move(m), std::move(ys));
    }
  }

  scm.finalize();
  return scm;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void expect_tag(std::istream& is, const std::string& tag) {
  std::string got;
  is >> got;
  if (got != tag) throw std::runtime_error("scm parse: expected '" + tag + "', got '" + got + "'");
}

}  // namespace

void save_scm(const DiscreteScm& scm, std::ostream& os) {
  os << "crat-scm v1\n";
  os << "d " << scm.d << "\n";
  os << "token_card " << scm.token_card << "\n";
  os << "nx " << scm.p_nx.size() << "\n";
  os << "p_nx";
  for (double p : scm.p_nx) os << ' ' << fmt_double(p);
  os << "\n";
  for (const auto& x : scm.f_table) {
    os << "f";
    for (int v : x) os << ' ' << v;
    os << "\n";
  }
  os << "nz " << scm.p_nz.size() << "\n";
  os << "p_nz";
  for (double p : scm.p_nz) os << ' ' << fmt_double(p);
  os << "\n";
  for (const auto& row : scm.g_table) {
    os << "g";
    for (std::uint32_t z : row) os << ' ' << z;
    os << "\n";
  }
  os << "ny " << scm.p_ny.size() << "\n";
  os << "p_ny";
  for (double p : scm.p_ny) os << ' ' << fmt_double(p);
  os << "\n";
  os << "h_count " << scm.h_table.size() << "\n";
  for (const auto& [m, ys] : scm.h_table) {
    os << "h";
    for (int v : m) os << ' ' << v;
    os << " :";
    for (int y : ys) os << ' ' << y;
    os << "\n";
  }
}

DiscreteScm load_scm(std::istream& is) {
  DiscreteScm scm;
  std::string header, version;
  is >> header >> version;
  if (header != "crat-scm" || version != "v1") throw std::runtime_error("not a crat-scm v1 stream");
  std::size_t nx = 0, nz = 0, ny = 0, h_count = 0;

  expect_tag(is, "d");
  is >> scm.d;
  expect_tag(is, "token_card");
  is >> scm.token_card;
  expect_tag(is, "nx");
  is >> nx;
  expect_tag(is, "p_nx");
  scm.p_nx.resize(nx);
  for (auto& p : scm.p_nx) is >> p;
  scm.f_table.resize(nx);
  for (auto& x : scm.f_table) {
    expect_tag(is, "f");
    x.resize(static_cast<std::size_t>(scm.d));
    for (auto& v : x) is >> v;
  }
  expect_tag(is, "nz");
  is >> nz;
  expect_tag(is, "p_nz");
  scm.p_nz.resize(nz);
  for (auto& p : scm.p_nz) is >> p;

  // Count distinct rows of f to size the g table.
  std::vector<std::vector<int>> xs;
  for (const auto& x : scm.f_table) {
    bool seen = false;
    for (const auto& p : xs) {
      if (p == x) { seen = true; break; }
    }
    if (!seen) xs.push_back(x);
  }
  scm.g_table.resize(xs.size());
  for (auto& row : scm.g_table) {
    expect_tag(is, "g");
    row.resize(nz);
    for (auto& z : row) is >> z;
  }
  expect_tag(is, "ny");
  is >> ny;
  expect_tag(is, "p_ny");
  scm.p_ny.resize(ny);
  for (auto& p : scm.p_ny) is >> p;
  expect_tag(is, "h_count");
  is >> h_count;
  for (std::size_t i = 0; i < h_count; ++i) {
    expect_tag(is, "h");
    std::vector<int> m(static_cast<std::size_t>(scm.d));
    for (auto& v : m) is >> v;
    expect_tag(is, ":");
    std::vector<int> ys(ny);
    for (auto& y : ys) is >> y;
    scm.h_table.emplace(std::move(m), std::move(ys));
  }
  if (!is) throw std::runtime_error("truncated crat-scm stream");
  scm.finalize();
  return scm;
}

void save_fixture(const ScmFixture& fx, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  save_scm(fx.scm, os);
  for (const auto& e : fx.expects) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", e.value);
    os << "expect " << e.kind << ' ' << e.x_id << ' ' << e.z << ' ' << e.j
       << ' ' << e.y << ' ' << buf << "\n";
  }
  os << "end\n";
}

ScmFixture load_fixture(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  ScmFixture fx;
  fx.scm = load_scm(is);
  std::string tag;
  while (is >> tag) {
    if (tag == "end") break;
    if (tag != "expect") throw std::runtime_error("fixture parse: unexpected token '" + tag + "'");
    OracleExpectation e;
    is >> e.kind >> e.x_id >> e.z >> e.j >> e.y >> e.value;
    fx.expects.push_back(e);
  }
  if (tag != "end") throw std::runtime_error("fixture missing end marker: " + path);
  return fx;
}

}  // namespace crat
