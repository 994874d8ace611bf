#include "config.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kquant/error.hpp"

namespace kquant::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') return false;
  }
  return true;
}

double to_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigInvalid(key, "expected a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigInvalid(key, "expected a number, got '" + text + "'");
  return v;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& origin) {
  ExperimentConfig cfg;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigInvalid("", where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_name(section)) throw ConfigInvalid("", where + ": bad section name '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigInvalid("", where + ": expected 'key = value'");
    const std::string name = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_name(name)) throw ConfigInvalid("", where + ": bad key '" + name + "'");
    const std::string key = section.empty() ? name : section + "." + name;
    if (!cfg.parameters_.emplace(key, value).second) throw ConfigInvalid(key, where + ": duplicate key");
  }
  const auto exp = cfg.parameters_.find("experiment");
  if (exp == cfg.parameters_.end()) throw ConfigInvalid("experiment", "missing experiment name");
  cfg.experiment_ = exp->second;
  cfg.output_dir_ = cfg.get_string("output", "");
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("", "cannot read config file '" + path + "'");
  ExperimentConfig cfg = parse(in, path);
  const auto parent = std::filesystem::path(path).parent_path();
  cfg.base_dir_ = parent.empty() ? "." : parent.string();
  return cfg;
}

std::vector<std::string> ExperimentConfig::section_keys(const std::string& section) const {
  std::vector<std::string> out;
  const std::string prefix = section + ".";
  for (auto it = parameters_.lower_bound(prefix); it != parameters_.end() && it->first.rfind(prefix, 0) == 0; ++it) {
    out.push_back(it->first.substr(prefix.size()));
  }
  return out;
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = parameters_.find(key);
  return it == parameters_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto it = parameters_.find(key);
  return it == parameters_.end() ? fallback : to_number(key, it->second);
}

double ExperimentConfig::get_positive(const std::string& key, double fallback) const {
  const double v = get_double(key, fallback);
  if (!(v > 0.0)) throw ConfigInvalid(key, "must be positive, got " + get_string(key, std::to_string(v)));
  return v;
}

int ExperimentConfig::get_int(const std::string& key, int fallback, int min_value) const {
  const double v = get_double(key, fallback);
  if (v != std::floor(v) || v < min_value || v > 1e9) {
    throw ConfigInvalid(key, "must be an integer >= " + std::to_string(min_value));
  }
  return static_cast<int>(v);
}

std::vector<std::string> ExperimentConfig::get_list(const std::string& key, const std::vector<std::string>& fallback) const {
  const auto it = parameters_.find(key);
  if (it == parameters_.end()) return fallback;
  std::string text = trim(it->second);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw ConfigInvalid(key, "unterminated list");
    text = text.substr(1, text.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigInvalid(key, "empty list entry");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigInvalid(key, "list must not be empty");
  return out;
}

std::vector<double> ExperimentConfig::get_positive_list(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : get_list(key, {})) {
    const double v = to_number(key, item);
    if (!(v > 0.0)) throw ConfigInvalid(key, "values must be positive, got " + item);
    out.push_back(v);
  }
  return out;
}

Rational ExperimentConfig::get_rational(const std::string& key, const Rational& fallback) const {
  const auto it = parameters_.find(key);
  if (it == parameters_.end()) return fallback;
  try {
    return parse_rational(it->second);
  } catch (const Error& e) {
    throw ConfigInvalid(key, e.what());
  }
}

std::vector<Rational> ExperimentConfig::get_positive_rational_list(const std::string& key,
                                                                   const std::vector<Rational>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<Rational> out;
  for (const auto& item : get_list(key, {})) {
    Rational r;
    try {
      r = parse_rational(item);
    } catch (const Error& e) {
      throw ConfigInvalid(key, e.what());
    }
    if (!(r > 0)) throw ConfigInvalid(key, "values must be positive, got " + item);
    out.push_back(r);
  }
  return out;
}

std::string ExperimentConfig::resolve_path(const std::string& value) const {
  const std::filesystem::path p(value);
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(base_dir_) / p).lexically_normal().string();
}

}  // namespace kquant::cli
