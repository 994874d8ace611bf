#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kquant/rational.hpp"

namespace kquant::cli {

/// Invalid configuration; `key` names the offending entry ("section.key"), or
/// is empty for file-level problems.
class ConfigInvalid : public std::runtime_error {
 public:
  ConfigInvalid(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Parsed experiment config. Grammar (see docs/config.md):
///
///   line    := blank | comment | section | entry
///   comment := '#' anything
///   section := '[' name ']'
///   entry   := key '=' value
///
/// Entries before the first section are top level (experiment, output).
/// Inside a section, a key is stored as "section.key". Values are the trimmed
/// rest of the line and may contain '=' and ';'.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(std::istream& in, const std::string& origin = "<config>");
  /// Reads a file; relative paths inside the config resolve against its
  /// directory.
  static ExperimentConfig load(const std::string& path);

  const std::string& experiment() const { return experiment_; }
  const std::string& output_dir() const { return output_dir_; }
  void set_output_dir(std::string dir) { output_dir_ = std::move(dir); }
  const std::map<std::string, std::string>& parameters() const { return parameters_; }
  /// Keys of one section, without the "section." prefix, in sorted order.
  std::vector<std::string> section_keys(const std::string& section) const;

  bool has(const std::string& key) const { return parameters_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  double get_positive(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback, int min_value) const;
  std::vector<double> get_positive_list(const std::string& key, const std::vector<double>& fallback) const;
  Rational get_rational(const std::string& key, const Rational& fallback) const;
  std::vector<Rational> get_positive_rational_list(const std::string& key, const std::vector<Rational>& fallback) const;
  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;
  /// Resolves a path value against the config directory.
  std::string resolve_path(const std::string& value) const;

 private:
  std::string experiment_;
  std::string output_dir_;
  std::string base_dir_ = ".";
  std::map<std::string, std::string> parameters_;
};

}  // namespace kquant::cli
