#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace smld {

using Cell = std::variant<std::monostate, double, long, bool, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

struct Report {
  std::vector<Table> tables;
};

enum class Format { csv, json };

// CSV: header then rows, '.' decimals, shortest round-trip numbers, empty
// field for a missing value. Several tables are separated by a blank line and
// each is introduced by a "# table: <name>" line. JSON: {"tables": [{"name",
// "columns", "rows": [{column: value}]}]} with keys in column order.
void emit(const Report& report, Format format, std::ostream& out);
std::string render(const Report& report, Format format);

// Writes to path, or to out when path is empty.
void emit_to(const Report& report, Format format, const std::string& path, std::ostream& out);

}  // namespace smld
