#include "mfdfa/tsv.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace mfdfa {

void TsvTable::add(std::string name, std::vector<double> column) {
  if (!columns.empty() && column.size() != rows())
    throw std::invalid_argument("tsv column '" + name + "' has mismatched length");
  names.push_back(std::move(name));
  columns.push_back(std::move(column));
}

void write_tsv(std::ostream& out, const TsvTable& table,
               const std::vector<std::string>& integer_columns) {
  std::vector<bool> integral(table.names.size(), false);
  for (std::size_t c = 0; c < table.names.size(); ++c) {
    out << (c ? "\t" : "") << table.names[c];
    integral[c] = std::find(integer_columns.begin(), integer_columns.end(), table.names[c]) !=
                  integer_columns.end();
  }
  out << '\n';
  char buf[40];
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const double v = table.columns[c][r];
      if (integral[c])
        std::snprintf(buf, sizeof buf, "%.0f", v);
      else
        std::snprintf(buf, sizeof buf, "%.10g", v);
      out << (c ? "\t" : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace mfdfa
