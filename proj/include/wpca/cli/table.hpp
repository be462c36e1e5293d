#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace wpca::cli {

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string, bool>;

/// A rectangular result table with a mandatory header row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Free-form key/value notes, emitted only by the JSON writer.
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;
};

/// Shortest decimal that parses back to exactly x ("nan", "inf", "-inf" for
/// non-finite values).
std::string format_double(double x);

std::string format_cell(const Cell& cell);

void write_csv(std::ostream& out, const Table& table);

/// {"metadata": {...}, "columns": [...], "rows": [{column: value, ...}, ...]}
/// Non-finite numbers become null.
void write_json(std::ostream& out, const Table& table);

/// Raw CSV cells, header first. Handles double-quoted fields.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

}  // namespace wpca::cli
