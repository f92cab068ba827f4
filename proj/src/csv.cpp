#include "gre/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gre::csv {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, const std::string& source, std::size_t line) {
  if (cell.empty() || cell == "nan" || cell == "NaN") return std::nan("");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size()) {
    throw ParseError(source + ":" + std::to_string(line) + ": cannot parse number '" + cell + "'");
  }
  return v;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::string::npos;
}

Table parse(std::istream& in, const std::string& source) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                       " columns, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, source, lineno));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ParseError(source + ": missing header line");
  return t;
}

Table read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse(in, path);
}

std::size_t fidelity_columns(const Table& table) {
  std::size_t d = 0;
  while (d < table.header.size() && table.header[d] == "x" + std::to_string(d + 1)) ++d;
  if (d == 0) throw ParseError("CSV header must start with fidelity columns x1,...,xd");
  return d;
}

Dataset parse_dataset(const Table& table) {
  const std::size_t d = fidelity_columns(table);
  const std::size_t fcol = table.column("f");
  if (fcol != d) throw ParseError("dataset CSV must have column 'f' right after x1..xd");
  const std::size_t ccol = table.column("cost");
  if (table.header.size() != d + 1 + (ccol == std::string::npos ? 0 : 1)) {
    throw ParseError("dataset CSV header must be x1,...,xd,f[,cost]");
  }
  std::vector<std::vector<double>> pts;
  std::vector<double> vals, costs;
  for (const auto& r : table.rows) {
    pts.emplace_back(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(d));
    vals.push_back(r[fcol]);
    if (ccol != std::string::npos) costs.push_back(r[ccol]);
  }
  std::optional<std::vector<double>> c;
  if (ccol != std::string::npos) c = std::move(costs);
  return Dataset::from_rows(pts, vals, std::move(c));
}

Dataset read_dataset(const std::string& path) { return parse_dataset(read(path)); }

void write_dataset(std::ostream& out, const Dataset& data) {
  for (std::size_t k = 0; k < data.dim(); ++k) out << 'x' << (k + 1) << ',';
  out << 'f' << (data.costs() ? ",cost" : "") << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.point(i)) out << format(v) << ',';
    out << format(data.values()[i]);
    if (data.costs()) out << ',' << format((*data.costs())[i]);
    out << '\n';
  }
}

Candidates parse_candidates(const Table& table) {
  const std::size_t d = fidelity_columns(table);
  const std::size_t ccol = table.column("cost");
  if (ccol != d || table.header.size() != d + 1) throw ParseError("candidates CSV header must be x1,...,xd,cost");
  Candidates c;
  for (const auto& r : table.rows) {
    c.points.emplace_back(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(d));
    c.costs.push_back(r[ccol]);
  }
  return c;
}

Candidates read_candidates(const std::string& path) { return parse_candidates(read(path)); }

std::string format(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace gre::csv
