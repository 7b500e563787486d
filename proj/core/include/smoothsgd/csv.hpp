#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace smoothsgd {

/// Shortest decimal text that parses back to exactly `value`; empty for NaN.
std::string format_number(double value);

/// Comma-delimited writer: header on line 1, '\n' line endings, numbers in shortest
/// round-trip form, NaN as an empty field. Lines starting with '#' are comments.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  void comment(std::string_view text);
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;  // without the leading '#'

  std::size_t column(std::string_view name) const;  // throws if absent
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace smoothsgd
