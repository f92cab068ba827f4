#pragma once

#include "gre/dataset.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gre::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column, or npos when absent.
  std::size_t column(const std::string& name) const;
};

Table parse(std::istream& in, const std::string& source = "<stream>");
Table read(const std::string& path);

/// Dataset CSV: header `x1,...,xd,f[,cost]`.
Dataset read_dataset(const std::string& path);
Dataset parse_dataset(const Table& table);
void write_dataset(std::ostream& out, const Dataset& data);

/// Candidates CSV: header `x1,...,xd,cost`.
struct Candidates {
  std::vector<std::vector<double>> points;
  std::vector<double> costs;
};
Candidates read_candidates(const std::string& path);
Candidates parse_candidates(const Table& table);

/// Number of leading `x1..xd` columns.
std::size_t fidelity_columns(const Table& table);

/// Formats a double with 17 significant digits.
std::string format(double v);

}  // namespace gre::csv
