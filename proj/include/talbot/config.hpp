#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace talbot {

// Any malformed, unknown or out-of-range configuration entry.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat "key = value" file; '#' starts a comment. Lists are comma separated.
class experiment_config {
 public:
  static experiment_config parse(const std::string& text);
  static experiment_config load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::int64_t> get_int_list(const std::string& key,
                                         const std::vector<std::int64_t>& fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
  // Positive tolerance; anything else is a config_error.
  double get_tolerance(const std::string& key, double fallback) const;

  // Keys present in the file that no getter asked for.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

}  // namespace talbot
