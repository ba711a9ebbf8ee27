#include "smld/report.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "smld/error.hpp"
#include "smld/format.hpp"

namespace smld {

namespace {

std::string csv_field(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(long v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::ordered_json json_value(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(double v) const {
      if (!std::isfinite(v)) return nullptr;
      return v;
    }
    nlohmann::ordered_json operator()(long v) const { return v; }
    nlohmann::ordered_json operator()(bool v) const { return v; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

void emit_csv(const Report& report, std::ostream& out) {
  bool named = report.tables.size() > 1;
  for (std::size_t t = 0; t < report.tables.size(); ++t) {
    const Table& table = report.tables[t];
    if (t > 0) out << '\n';
    if (named) out << "# table: " << table.name << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
      out << '\n';
    }
  }
}

void emit_json(const Report& report, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["tables"] = nlohmann::ordered_json::array();
  for (const Table& table : report.tables) {
    nlohmann::ordered_json t;
    t["name"] = table.name;
    t["columns"] = table.columns;
    t["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json r = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = json_value(row[i]);
      t["rows"].push_back(std::move(r));
    }
    doc["tables"].push_back(std::move(t));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    fail(Errc::io, "table '" + name + "': row has " + std::to_string(row.size()) + " cells, expected " +
                       std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

void emit(const Report& report, Format format, std::ostream& out) {
  if (format == Format::csv)
    emit_csv(report, out);
  else
    emit_json(report, out);
  if (!out) fail(Errc::io, "failed to write report");
}

std::string render(const Report& report, Format format) {
  std::ostringstream os;
  emit(report, format, os);
  return os.str();
}

void emit_to(const Report& report, Format format, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    emit(report, format, out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(Errc::io, "cannot open '" + path + "' for writing");
  emit(report, format, file);
}

}  // namespace smld
