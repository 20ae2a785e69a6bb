#include "topoclock/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <utility>

#include "topoclock/error.hpp"

namespace topoclock {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw NumericalError("could not format floating-point value");
  return std::string(buf.data(), end);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_comment(std::string_view line) { comments_.emplace_back(line); }

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) throw InvalidArgument("CSV row width mismatch");
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format_double(values[i]);
  }
  rows_.push_back(std::move(row));
}

void CsvTable::add_raw_row(std::string row) { rows_.push_back(std::move(row)); }

std::string CsvTable::str() const {
  std::string out;
  for (const auto& c : comments_) {
    out += "# ";
    out += c;
    out += '\n';
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& r : rows_) {
    out += r;
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << str();
  if (!f) throw Error("failed writing " + path);
}

}  // namespace topoclock
