#include "table.hpp"

#include <cstdio>
#include <sstream>

namespace mbpi {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Table::add(std::vector<double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(fmt(v));
  rows.push_back(std::move(cells));
}

std::string Table::str() const {
  std::ostringstream os;
  for (const auto& line : header) os << "# " << line << '\n';
  for (std::size_t k = 0; k < columns.size(); ++k) os << (k ? "," : "") << columns[k];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
    os << '\n';
  }
  return os.str();
}

}  // namespace mbpi
