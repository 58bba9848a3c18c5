#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace graphnav {

/// Flat key-value config. Format, one entry per line:
///   # comment
///   include other.cfg        (path relative to the including file)
///   key = value
/// Later assignments override earlier ones (includes are processed in place).
class ConfigFile {
 public:
  ConfigFile() = default;

  static ConfigFile parse_file(const std::filesystem::path& path);
  static ConfigFile parse_string(const std::string& text,
                                 const std::filesystem::path& base_dir = ".");

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  long get_int(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;  // comma separated
  std::vector<double> get_double_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// FNV-1a over sorted key=value pairs; stable provenance fingerprint.
  std::uint64_t hash() const;

 private:
  void parse_stream(std::istream& is, const std::filesystem::path& base_dir);
  std::map<std::string, std::string> entries_;
};

}  // namespace graphnav
