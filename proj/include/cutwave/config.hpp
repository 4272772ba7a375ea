// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cutwave
{

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration. `#` starts a comment; later assignments win.
class KeyValueConfig
{
public:
  static KeyValueConfig from_file(const std::string& path);

  /// Parses text; `source` labels error messages.
  void parse(const std::string& text, const std::string& source = "<text>");
  /// Parses a single `key=value` override.
  void parse_assignment(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

  /// Keys that were set but never read.
  std::vector<std::string> unused_keys() const;

private:
  const std::string* lookup(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

std::string trim(const std::string& s);
std::vector<std::string> split_list(const std::string& s);
double parse_double(const std::string& text, const std::string& key);
long long parse_int(const std::string& text, const std::string& key);

}  // namespace cutwave
