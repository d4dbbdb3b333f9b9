#include "zeno/table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace zeno {

namespace {

std::string render(const Cell& cell, bool quote_strings) {
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  const auto& s = std::get<std::string>(cell);
  return quote_strings ? nlohmann::json(s).dump() : s;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (res.ec != std::errc()) throw std::runtime_error("failed to format number");
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << render(row[c], false);
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& table) {
  os << '[';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    os << (r ? ",\n " : "\n ") << '{';
    const auto& row = table.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << (c ? "," : "") << nlohmann::json(table.columns[c]).dump() << ':';
      const auto* d = std::get_if<double>(&row[c]);
      // JSON has no representation for non-finite numbers.
      if (d && !std::isfinite(*d))
        os << "null";
      else
        os << render(row[c], true);
    }
    os << '}';
  }
  os << (table.rows.empty() ? "]\n" : "\n]\n");
}

}  // namespace zeno
