#include "gradsense/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gradsense/error.hpp"

namespace gradsense {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json cell_json(const Cell& c) {
  if (std::holds_alternative<std::int64_t>(c)) return std::get<std::int64_t>(c);
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (!std::isfinite(v)) return nullptr;
    // Round through the text form so JSON and CSV carry the same value.
    return std::stod(format_cell(c));
  }
  return nullptr;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw InvalidArgument("row has " + std::to_string(row.size()) + " cells, table has " +
                          std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidArgument("no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::string format_cell(const Cell& c) {
  if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
  }
  return "";
}

std::string to_csv(const Table& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out << (i ? "," : "") << csv_escape(t.columns[i]);
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(format_cell(row[i]));
    out << '\n';
  }
  return out.str();
}

std::string to_json(const Table& t) {
  ordered_json root;
  root["title"] = t.title;
  ordered_json meta = ordered_json::object();
  for (const auto& [key, value] : t.meta) meta[key] = cell_json(value);
  root["meta"] = meta;
  root["columns"] = t.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(obj));
  }
  root["rows"] = rows;
  return root.dump(2) + "\n";
}

std::string to_text(const Table& t) {
  std::ostringstream out;
  if (!t.title.empty()) out << t.title << "\n\n";
  std::size_t key_width = 0;
  for (const auto& [key, value] : t.meta) key_width = std::max(key_width, key.size());
  for (const auto& [key, value] : t.meta) {
    out << key << std::string(key_width - key.size(), ' ') << " : " << format_cell(value) << '\n';
  }
  if (!t.meta.empty()) out << '\n';

  std::vector<std::size_t> widths(t.columns.size());
  for (std::size_t i = 0; i < t.columns.size(); ++i) widths[i] = t.columns[i].size();
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      widths[i] = std::max(widths[i], format_cell(row[i]).size());
    }
  }
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += "  ";
      s += cells[i] + std::string(widths[i] - cells[i].size(), ' ');
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out << s << '\n';
  };
  line(t.columns);
  std::vector<std::string> rule;
  for (std::size_t w : widths) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& row : t.rows) {
    std::vector<std::string> cells;
    for (const auto& c : row) cells.push_back(format_cell(c));
    line(cells);
  }
  return out.str();
}

void write_table(const Table& t, const std::filesystem::path& dir, const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / (stem + ".csv"), to_csv(t));
  write_file(dir / (stem + ".json"), to_json(t));
  write_file(dir / (stem + ".txt"), to_text(t));
}

}  // namespace gradsense
