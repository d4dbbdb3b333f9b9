#pragma once

// Locale-independent CSV / JSON emission of result tables.

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace zeno {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// 17 significant digits, independent of the global locale.
std::string format_double(double value);

/// Header line then one line per row, '\n' terminated.
void write_csv(std::ostream& os, const Table& table);
/// Array of row objects keyed by column name.
void write_json(std::ostream& os, const Table& table);

}  // namespace zeno
