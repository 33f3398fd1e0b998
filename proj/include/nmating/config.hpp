#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace nmating {

// Flat key=value configuration. Lines are `key = value`, blank, or `#`
// comments. Unknown keys are kept; values stay strings until queried.
class Config {
public:
  Config() = default;
  static Config load(const std::string &path);
  static Config parse(const std::string &text, const std::string &origin);

  bool has(const std::string &key) const { return kv_.count(key) > 0; }
  std::string get(const std::string &key, const std::string &fallback) const;
  long get_long(const std::string &key, long fallback) const;
  double get_double(const std::string &key, double fallback) const;
  void set(const std::string &key, const std::string &value) { kv_[key] = value; }

  const std::map<std::string, std::string> &items() const { return kv_; }

private:
  std::map<std::string, std::string> kv_;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace nmating
