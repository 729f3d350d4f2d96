#pragma once

#include <map>
#include <string>
#include <vector>

namespace mbpi {

// Flat key=value text with optional [section] headers, read through the
// Boost INI parser. Keys inside a section are stored as "section.key". Lines
// starting with '#' or ';' are comments.
class KeyValueBlock {
 public:
  static KeyValueBlock parse(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string require_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double require_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  // "1,10,100" style list.
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

  // Keys of the form "section.key".
  const std::map<std::string, std::string>& values() const { return values_; }
  // Restricts to keys in `section`, with the prefix stripped.
  KeyValueBlock section(const std::string& name) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace mbpi
