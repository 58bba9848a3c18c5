#include "graphnav/config_file.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace graphnav {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path.string());
  ConfigFile cfg;
  cfg.parse_stream(is, path.has_parent_path() ? path.parent_path() : ".");
  return cfg;
}

ConfigFile ConfigFile::parse_string(const std::string& text,
                                    const std::filesystem::path& base_dir) {
  std::istringstream is(text);
  ConfigFile cfg;
  cfg.parse_stream(is, base_dir);
  return cfg;
}

void ConfigFile::parse_stream(std::istream& is, const std::filesystem::path& base_dir) {
  std::string line;
  while (std::getline(is, line)) {
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("include ", 0) == 0) {
      const std::filesystem::path inc = base_dir / trim(line.substr(8));
      std::ifstream sub(inc);
      if (!sub) throw std::runtime_error("config: cannot open include " + inc.string());
      parse_stream(sub, inc.has_parent_path() ? inc.parent_path() : base_dir);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: malformed line '" + line + "'");
    entries_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
}

void ConfigFile::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

bool ConfigFile::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string ConfigFile::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw std::runtime_error("config: missing key '" + key + "'");
  return it->second;
}

std::string ConfigFile::get_string(const std::string& key,
                                   const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

long ConfigFile::get_int(const std::string& key, long fallback) const {
  return has(key) ? std::stol(get_string(key)) : fallback;
}

long ConfigFile::get_int(const std::string& key) const {
  return std::stol(get_string(key));
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? std::stod(get_string(key)) : fallback;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::runtime_error("config: bad boolean for '" + key + "': " + v);
}

std::vector<std::string> ConfigFile::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream is(get_string(key));
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::vector<double> ConfigFile::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : get_list(key)) out.push_back(std::stod(s));
  return out;
}

std::uint64_t ConfigFile::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const std::string& s) {
    for (const char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : entries_) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  return h;
}

}  // namespace graphnav
