#pragma once

#include <string>
#include <variant>
#include <vector>

namespace gci::cli {

using Cell = std::variant<std::string, double, bool, long long>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// RFC 4180: CRLF line ends, header row, fields quoted only when they need it.
std::string to_csv(const Table& table);
// {"columns": [...], "rows": [{column: value}, ...]}; non-finite doubles become null.
std::string to_json(const Table& table);

}  // namespace gci::cli
