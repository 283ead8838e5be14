#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>

#include "abcmc/models.hpp"

namespace abcmc {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

bool is_missing(std::string_view cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "na";
}

bool parse_number(std::string_view cell, double& out) {
  const auto* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

char detect_delimiter(const std::string& line) {
  for (char c : {',', ';', '\t'})
    if (line.find(c) != std::string::npos) return c;
  return ',';
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

}  // namespace

ToadData load_toad_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open toad data file " + path.string());

  ToadData out;
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  char delim = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (delim == 0) delim = detect_delimiter(line);
    const auto cells = split(line, delim);
    std::vector<double> row(cells.size(), std::numeric_limits<double>::quiet_NaN());
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (is_missing(cells[c])) continue;
      if (!parse_number(cells[c], row[c])) numeric = false;
    }
    if (!numeric) {
      if (rows == 0 && !out.had_header) {
        out.had_header = true;
        continue;
      }
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": unparsable cell");
    }
    if (cols == 0) cols = row.size();
    if (row.size() != cols) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                        " cells, found " + std::to_string(row.size()));
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows < 2 || cols < 1) throw ConfigError(path.string() + ": toad matrix needs at least two day rows");

  out.locations.shape = {rows, cols};
  out.locations.values = std::move(values);
  out.observed_days_per_toad.assign(cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (std::isnan(out.locations.at(r, c))) {
        ++out.missing_cells;
      } else {
        ++out.observed_days_per_toad[c];
      }
    }
  }
  return out;
}

}  // namespace abcmc
