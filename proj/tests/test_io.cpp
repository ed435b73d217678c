#include <filesystem>
#include <fstream>

#include "crat/checkpoint.hpp"
#include "crat/config.hpp"
#include "doctest.h"

using namespace crat;

TEST_CASE("config parses key-value lines with comments") {
  const Config cfg = Config::from_string(
      "# hyperparameters\n"
      "mu = 0.1\n"
      "epochs=10   # inline comment\n"
      "name = spurious-a\n"
      "\n");
  CHECK(cfg.get_double("mu", 0.0) == doctest::Approx(0.1));
  CHECK(cfg.get_size("epochs", 0) == 10);
  CHECK(cfg.get_string("name", "") == "spurious-a");
  CHECK(cfg.get_double("missing", 2.5) == 2.5);
  CHECK(cfg.has("mu"));
  CHECK_FALSE(cfg.has("missing"));
}

TEST_CASE("config rejects malformed lines and values") {
  CHECK_THROWS(Config::from_string("this has no equals sign\n"));
  const Config cfg = Config::from_string("mu = fast\n");
  CHECK_THROWS(cfg.get_double("mu", 0.0));
}

TEST_CASE("config hash is stable and value-sensitive") {
  const Config a = Config::from_string("a = 1\nb = 2\n");
  const Config b = Config::from_string("b = 2\na = 1\n");  // order-insensitive
  CHECK(a.hash() == b.hash());
  Config c = a;
  c.set("a", "3");
  CHECK(c.hash() != a.hash());
  CHECK(a.hash().size() == 16);
}

TEST_CASE("checkpoint round trip preserves every parameter bit") {
  ModelParams p = init_params(7);
  Rng rng(3);
  for (auto& v : p.selector.w) v = rng.next_gaussian() * 1e3;
  for (auto& v : p.predictor.w) v = rng.next_gaussian() * 1e-7;
  p.selector.b = -0.12345678901234567;
  p.predictor.b = 3.9;
  const auto path = std::filesystem::temp_directory_path() / "crat_ckpt_test.txt";
  save_checkpoint(p, path.string());
  const ModelParams back = load_checkpoint(path.string());
  CHECK(back.selector.w == p.selector.w);
  CHECK(back.predictor.w == p.predictor.w);
  CHECK(back.selector.b == p.selector.b);
  CHECK(back.predictor.b == p.predictor.b);
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint loader rejects foreign files") {
  const auto path = std::filesystem::temp_directory_path() / "crat_ckpt_bad.txt";
  {
    std::ofstream f(path);
    f << "something else entirely\n";
  }
  CHECK_THROWS(load_checkpoint(path.string()));
  CHECK_THROWS(load_checkpoint("/nonexistent/path/file.txt"));
  std::filesystem::remove(path);
}
