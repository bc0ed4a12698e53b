#pragma once
// Minimal CSV emission shared by every artifact writer. Numbers use 12
// significant digits so that identical inputs give byte-identical files.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace trustmarket::csv {

std::string format_number(double value);

class Row {
 public:
  Row& add(double value);
  Row& add(std::optional<double> value);  // empty field when absent
  Row& add(std::int64_t value);
  Row& add(std::uint64_t value);
  Row& add(int value) { return add(static_cast<std::int64_t>(value)); }
  Row& add(bool value) { return add(static_cast<std::int64_t>(value ? 1 : 0)); }
  Row& add(std::string_view text);
  Row& add(const char* text) { return add(std::string_view(text)); }

  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  std::vector<std::string> fields_;
};

void write_header(std::ostream& os, const std::vector<std::string>& columns);
void write_row(std::ostream& os, const Row& row);

// Splits one LF-terminated line on commas. No quoting: none of our fields
// contain commas.
std::vector<std::string> split_line(std::string_view line);

}  // namespace trustmarket::csv
