#include "gci/cli/table.hpp"

#include <cmath>
#include <json.hpp>
#include <type_traits>

#include "gci/format.hpp"

namespace gci::cli {

namespace {

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell_text(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += quote_field(table.columns[c]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += quote_field(cell_text(row[c]));
    }
    out += "\r\n";
  }
  return out;
}

std::string to_json(const Table& table) {
  nlohmann::ordered_json doc;
  doc["columns"] = table.columns;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size() && c < table.columns.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              obj[table.columns[c]] = std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr;
            } else {
              obj[table.columns[c]] = v;
            }
          },
          row[c]);
    }
    doc["rows"].push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

}  // namespace gci::cli
