#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace mfdfa {

/// Column-oriented numeric table written as tab-separated text. Every column
/// must have the same length.
struct TsvTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  void add(std::string name, std::vector<double> column);
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Values are printed with %.10g; integral-valued columns listed in
/// `integer_columns` are printed without exponent or decimals.
void write_tsv(std::ostream& out, const TsvTable& table,
               const std::vector<std::string>& integer_columns = {});

}  // namespace mfdfa
