#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace clickstat {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Column-named rows emitted by the sweep runners.  `notes` collects
/// non-fatal per-row problems (overflowed odds, zero acceptance, ...).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;

  std::size_t column(const std::string& name) const;
};

/// "%.17g", with inf / -inf / nan spelled out.
std::string format_double(double value);

/// Header line then one line per row; fields containing ',' or '"' are
/// quoted.  Empty strings are written as empty fields.
void write_csv(const Table& table, std::ostream& out);

/// {"columns": [...], "rows": [{column: value, ...}, ...]}; non-finite
/// doubles become null.
void write_json(const Table& table, std::ostream& out);

/// Parses CSV written by write_csv back into string fields.
struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvDocument read_csv(std::istream& in);

/// strtod that also accepts inf / nan; ValidationError otherwise.
double parse_double_field(const std::string& field);

}  // namespace clickstat
