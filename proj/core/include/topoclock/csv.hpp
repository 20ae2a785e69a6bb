#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace topoclock {

// Shortest round-trip decimal form; locale independent.
std::string format_double(double value);

// Plot-ready table: '#' metadata lines, one header row, '.' decimals.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_comment(std::string_view line);
  void add_row(const std::vector<double>& values);
  void add_raw_row(std::string row);

  std::string str() const;
  void write(const std::string& path) const;
  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::string> rows_;
};

}  // namespace topoclock
