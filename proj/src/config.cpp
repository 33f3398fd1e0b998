#include "nmating/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nmating {

Config Config::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("malformed config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

Config Config::parse(const std::string &text, const std::string &origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("malformed config at " + origin + ":" +
                        std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty() ||
        key.find_first_of(" \t") != std::string::npos)
      throw ConfigError("malformed config at " + origin + ":" +
                        std::to_string(lineno) + ": bad key '" + key + "'");
    c.kv_[key] = val;
  }
  return c;
}

std::string Config::get(const std::string &key, const std::string &fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

long Config::get_long(const std::string &key, long fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  char *end = nullptr;
  long v = std::strtol(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    throw ConfigError("malformed config: key '" + key + "' is not an integer");
  return v;
}

double Config::get_double(const std::string &key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  char *end = nullptr;
  double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw ConfigError("malformed config: key '" + key + "' is not a number");
  return v;
}

} // namespace nmating
