#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gradsense {

/// Empty, integer, real or text table cell. Reals are printed with 6 decimals.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

/// Ordered key/value metadata printed ahead of a table (seed, metric settings, ...).
using Metadata = std::vector<std::pair<std::string, Cell>>;

struct Table {
  std::string title;
  Metadata meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws InvalidArgument if the row width does not match the columns.
  void add_row(std::vector<Cell> row);
  /// Index of `column`, throws InvalidArgument if absent.
  std::size_t column(const std::string& name) const;
};

std::string format_cell(const Cell& c);

/// Header line plus one line per row; metadata is not part of the CSV.
std::string to_csv(const Table& t);
/// {"title", "meta": {...}, "columns": [...], "rows": [{column: value}, ...]}
std::string to_json(const Table& t);
/// Aligned, human-readable rendering with the metadata block on top.
std::string to_text(const Table& t);

/// Writes <stem>.csv, <stem>.json and <stem>.txt under `dir`. Throws IoError.
void write_table(const Table& t, const std::filesystem::path& dir, const std::string& stem);

}  // namespace gradsense
