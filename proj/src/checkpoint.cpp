#include "crat/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace crat {
namespace {

void write_array(std::ostream& os, const std::string& name, const Vector& v,
                 std::size_t rows, std::size_t cols) {
  os << name << ' ' << rows << ' ' << cols << '\n';
  char buf[64];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    os << buf << (i + 1 == v.size() || (i + 1) % cols == 0 ? '\n' : ' ');
  }
  if (v.empty()) os << '\n';
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "crat-checkpoint v1\n";
  write_array(os, "selector_w", params.selector.w, 1, params.selector.w.size());
  write_array(os, "selector_b", {params.selector.b}, 1, 1);
  write_array(os, "predictor_w", params.predictor.w, 1, params.predictor.w.size());
  write_array(os, "predictor_b", {params.predictor.b}, 1, 1);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::string header, version;
  is >> header >> version;
  if (header != "crat-checkpoint" || version != "v1") {
    throw std::runtime_error("not a crat-checkpoint v1 file: " + path);
  }
  std::map<std::string, Vector> arrays;
  std::string name;
  while (is >> name) {
    std::size_t rows = 0, cols = 0;
    if (!(is >> rows >> cols)) throw std::runtime_error("truncated checkpoint: " + path);
    Vector v(rows * cols);
    for (auto& x : v) {
      if (!(is >> x)) throw std::runtime_error("truncated checkpoint: " + path);
    }
    arrays[name] = std::move(v);
  }
  for (const char* required : {"selector_w", "selector_b", "predictor_w", "predictor_b"}) {
    if (!arrays.count(required)) {
      throw std::runtime_error("checkpoint missing array '" + std::string(required) + "': " + path);
    }
  }
  ModelParams params;
  params.selector.w = arrays["selector_w"];
  params.selector.b = arrays["selector_b"].at(0);
  params.predictor.w = arrays["predictor_w"];
  params.predictor.b = arrays["predictor_b"].at(0);
  return params;
}

}  // namespace crat
