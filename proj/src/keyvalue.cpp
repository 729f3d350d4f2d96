#include "keyvalue.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <sstream>

#include "mbpi/errors.hpp"

namespace mbpi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("field '" + key + "': expected a number, got '" + text + "'");
}

}  // namespace

KeyValueBlock KeyValueBlock::parse(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  KeyValueBlock block;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      block.values_[name] = trim(node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) block.values_[name + "." + key] = trim(leaf.data());
  }
  return block;
}

std::string KeyValueBlock::require_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) throw ConfigError("missing required field '" + key + "'");
  return it->second;
}

std::string KeyValueBlock::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueBlock::require_double(const std::string& key) const { return to_double(key, require_string(key)); }

double KeyValueBlock::get_double(const std::string& key, double fallback) const {
  return has(key) ? to_double(key, values_.at(key)) : fallback;
}

int KeyValueBlock::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double v = to_double(key, values_.at(key));
  if (v != static_cast<double>(static_cast<long long>(v))) {
    throw ConfigError("field '" + key + "': expected an integer, got '" + values_.at(key) + "'");
  }
  return static_cast<int>(v);
}

std::vector<double> KeyValueBlock::get_doubles(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  std::stringstream ss(values_.at(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError("field '" + key + "': empty list");
  return out;
}

KeyValueBlock KeyValueBlock::section(const std::string& name) const {
  KeyValueBlock out;
  const std::string prefix = name + ".";
  for (const auto& [key, value] : values_) {
    if (key.rfind(prefix, 0) == 0) out.values_[key.substr(prefix.size())] = value;
  }
  return out;
}

}  // namespace mbpi
