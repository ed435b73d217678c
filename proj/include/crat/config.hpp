#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace crat {

// Flat key-value configuration: one `key = value` per line, '#' comments.
// Values stay strings until typed access; unknown keys are an error at the
// call sites that consume a whole config.
class Config {
 public:
  Config() = default;
  explicit Config(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  // Canonical serialization (sorted keys) used for hashing and manifests.
  std::string canonical() const;

  // FNV-1a 64-bit over the canonical form, hex-encoded.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

std::string fnv1a_hex(const std::string& text);

}  // namespace crat
