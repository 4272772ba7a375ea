// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cutwave/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cutwave
{

std::string trim(const std::string& s)
{
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos)
    return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ','))
  {
    item = trim(item);
    if (!item.empty())
      out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& key)
{
  try
  {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size())
      return v;
  }
  catch (const std::exception&)
  {
  }
  throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
}

long long parse_int(const std::string& text, const std::string& key)
{
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec == std::errc() && ptr == end)
    return v;
  // Allow integral values written in scientific notation, e.g. 1e5.
  const double d = parse_double(text, key);
  if (d == static_cast<double>(static_cast<long long>(d)))
    return static_cast<long long>(d);
  throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  KeyValueConfig cfg;
  cfg.parse(buffer.str(), path);
  return cfg;
}

void KeyValueConfig::parse(const std::string& text, const std::string& source)
{
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line))
  {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError(source + ":" + std::to_string(number) + ": empty key");
    set(key, trim(line.substr(eq + 1)));
  }
}

void KeyValueConfig::parse_assignment(const std::string& assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void KeyValueConfig::set(const std::string& key, const std::string& value)
{
  values_[key] = value;
}

const std::string* KeyValueConfig::lookup(const std::string& key) const
{
  const auto it = values_.find(key);
  if (it == values_.end())
    return nullptr;
  used_.insert(key);
  return &it->second;
}

bool KeyValueConfig::has(const std::string& key) const
{
  return values_.count(key) > 0;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const
{
  const auto* v = lookup(key);
  return v ? *v : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const
{
  const auto* v = lookup(key);
  return v ? parse_double(*v, key) : fallback;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const
{
  const auto* v = lookup(key);
  return v ? parse_int(*v, key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const
{
  const auto* v = lookup(key);
  if (!v)
    return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "1" || s == "true" || s == "yes" || s == "on")
    return true;
  if (s == "0" || s == "false" || s == "no" || s == "off")
    return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + *v + "'");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key,
                                                  const std::vector<std::string>& fallback) const
{
  const auto* v = lookup(key);
  return v ? split_list(*v) : fallback;
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key,
                                              const std::vector<int>& fallback) const
{
  const auto* v = lookup(key);
  if (!v)
    return fallback;
  std::vector<int> out;
  for (const auto& item : split_list(*v))
    out.push_back(static_cast<int>(parse_int(item, key)));
  return out;
}

std::vector<std::string> KeyValueConfig::unused_keys() const
{
  std::vector<std::string> out;
  for (const auto& [key, value] : values_)
    if (!used_.count(key))
      out.push_back(key);
  return out;
}

}  // namespace cutwave
