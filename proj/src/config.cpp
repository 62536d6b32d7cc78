#include "talbot/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace talbot {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) ||
           c == '_';
  });
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

template <class T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw config_error("key '" + key + "': '" + v + "' is not an integer");
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(out))
    throw config_error("key '" + key + "': '" + v + "' is not a finite number");
  return out;
}

}  // namespace

experiment_config experiment_config::parse(const std::string& text) {
  experiment_config cfg;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw config_error("line " + std::to_string(number) + ": bad key '" + key + "'");
    if (value.empty())
      throw config_error("line " + std::to_string(number) + ": key '" + key + "' has no value");
    if (!cfg.entries_.emplace(key, value).second)
      throw config_error("line " + std::to_string(number) + ": duplicate key '" + key + "'");
  }
  return cfg;
}

experiment_config experiment_config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void experiment_config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw config_error("bad key '" + key + "'");
  entries_[key] = value;
}

const std::string* experiment_config::find(const std::string& key) const {
  used_.insert(key);
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string experiment_config::get_string(const std::string& key,
                                          const std::string& fallback) const {
  const auto* v = find(key);
  return v ? *v : fallback;
}

std::int64_t experiment_config::get_int(const std::string& key, std::int64_t fallback) const {
  const auto* v = find(key);
  return v ? parse_integer<std::int64_t>(key, *v) : fallback;
}

std::uint64_t experiment_config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto* v = find(key);
  return v ? parse_integer<std::uint64_t>(key, *v) : fallback;
}

double experiment_config::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  return v ? parse_real(key, *v) : fallback;
}

bool experiment_config::get_bool(const std::string& key, bool fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  throw config_error("key '" + key + "': '" + *v + "' is not a boolean");
}

std::vector<std::int64_t> experiment_config::get_int_list(
    const std::string& key, const std::vector<std::int64_t>& fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<std::int64_t> out;
  for (const auto& item : split(*v)) out.push_back(parse_integer<std::int64_t>(key, item));
  return out;
}

std::vector<double> experiment_config::get_double_list(const std::string& key,
                                                       const std::vector<double>& fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split(*v)) out.push_back(parse_real(key, item));
  return out;
}

double experiment_config::get_tolerance(const std::string& key, double fallback) const {
  const double v = get_double(key, fallback);
  if (!(v > 0.0)) throw config_error("tolerance '" + key + "' must be positive");
  return v;
}

std::vector<std::string> experiment_config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

}  // namespace talbot
