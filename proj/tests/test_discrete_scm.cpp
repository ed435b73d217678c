#include <cmath>
#include <filesystem>
#include <sstream>

#include "crat/discrete_scm.hpp"
#include "doctest.h"

using namespace crat;

TEST_CASE("random scm satisfies distribution and totality invariants") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ScmGenConfig cfg;
    cfg.d = 1 + static_cast<int>(rng.next_below(4));
    cfg.token_card = 1 + static_cast<int>(rng.next_below(3));
    cfg.nx = 1 + static_cast<int>(rng.next_below(4));
    cfg.nz = 1 + static_cast<int>(rng.next_below(4));
    cfg.ny = 1 + static_cast<int>(rng.next_below(4));
    cfg.force_monotone = (trial % 2) == 0;
    const DiscreteScm scm = random_discrete_scm(cfg, rng);

    double total = 0.0;
    for (double px : scm.p_nx) {
      for (double pz : scm.p_nz) {
        for (double py : scm.p_ny) total += px * pz * py;
      }
    }
    CHECK(std::abs(total - 1.0) < 1e-12);

    double x_total = 0.0;
    for (std::size_t xi = 0; xi < scm.x_values.size(); ++xi) {
      x_total += scm.prob_x(static_cast<int>(xi));
    }
    CHECK(std::abs(x_total - 1.0) < 1e-12);
  }
}

TEST_CASE("budget enforcement") {
  ScmGenConfig cfg;
  cfg.d = 7;
  Rng rng(1);
  CHECK_THROWS_AS(random_discrete_scm(cfg, rng), std::invalid_argument);
}

TEST_CASE("monotone generation makes h nondecreasing in every selection bit") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    ScmGenConfig cfg;
    cfg.d = 3;
    cfg.force_monotone = true;
    const DiscreteScm scm = random_discrete_scm(cfg, rng);
    for (std::size_t xi = 0; xi < scm.x_values.size(); ++xi) {
      for (std::uint32_t z = 0; z < scm.num_masks(); ++z) {
        for (int j = 0; j < scm.d; ++j) {
          if (z & (1u << j)) continue;
          const std::uint32_t z_on = z | (1u << j);
          for (std::size_t ny = 0; ny < scm.p_ny.size(); ++ny) {
            CHECK(scm.eval_h(static_cast<int>(xi), z_on, ny) >=
                  scm.eval_h(static_cast<int>(xi), z, ny));
          }
        }
      }
    }
  }
}

TEST_CASE("scm text round trip is exact") {
  Rng rng(42);
  ScmGenConfig cfg;
  cfg.d = 3;
  cfg.token_card = 2;
  const DiscreteScm scm = random_discrete_scm(cfg, rng);
  std::stringstream ss;
  save_scm(scm, ss);
  const DiscreteScm back = load_scm(ss);
  CHECK(back.d == scm.d);
  CHECK(back.p_nx == scm.p_nx);
  CHECK(back.p_nz == scm.p_nz);
  CHECK(back.p_ny == scm.p_ny);
  CHECK(back.f_table == scm.f_table);
  CHECK(back.g_table == scm.g_table);
  CHECK(back.h_table == scm.h_table);
}

TEST_CASE("fixture round trip keeps expectations") {
  Rng rng(5);
  ScmFixture fx;
  fx.scm = random_discrete_scm({}, rng);
  fx.expects.push_back({"cpns_j", 0, 3, 1, 1, 0.123456789012});
  fx.expects.push_back({"pns", 0, 1, 0, 0, 0.5});
  const auto path = std::filesystem::temp_directory_path() / "crat_fixture_test.txt";
  save_fixture(fx, path.string());
  const ScmFixture back = load_fixture(path.string());
  REQUIRE(back.expects.size() == 2);
  CHECK(back.expects[0].kind == "cpns_j");
  CHECK(back.expects[0].value == doctest::Approx(0.123456789012).epsilon(1e-12));
  CHECK(back.expects[1].kind == "pns");
  std::filesystem::remove(path);
}

TEST_CASE("generation is deterministic given the seed") {
  Rng r1(7), r2(7);
  ScmGenConfig cfg;
  cfg.d = 3;
  const DiscreteScm a = random_discrete_scm(cfg, r1);
  const DiscreteScm b = random_discrete_scm(cfg, r2);
  CHECK(a.f_table == b.f_table);
  CHECK(a.g_table == b.g_table);
  CHECK(a.h_table == b.h_table);
  CHECK(a.p_ny == b.p_ny);
}
