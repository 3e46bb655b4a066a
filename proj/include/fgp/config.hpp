#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fgp {

// Flat text config: `key = value` lines, `#` comments, `[section]` headers.
// Keys are addressed as "section.key" ("" section for the preamble).
class Config {
 public:
  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;
  double num(const std::string& key) const;
  double num_or(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer_or(const std::string& key, long long fallback) const;
  std::vector<double> num_list(const std::string& key) const;  // comma-separated

  void set(const std::string& key, const std::string& value);
  // sorted key=value lines; the manifest hashes this form
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace fgp
