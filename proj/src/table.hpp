#pragma once

#include <string>
#include <vector>

namespace mbpi {

// Comma-separated table with a '#'-prefixed header block.
struct Table {
  std::string name;
  std::vector<std::string> header;  // comment lines, without the '#'
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<double> values);
  void add_text(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
  std::string str() const;
};

// Round-trip precision.
std::string fmt(double v);

}  // namespace mbpi
