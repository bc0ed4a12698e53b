#include "trustmarket/csv.hpp"

#include <cmath>
#include <cstdio>

namespace trustmarket::csv {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

Row& Row::add(double value) {
  fields_.push_back(format_number(value));
  return *this;
}

Row& Row::add(std::optional<double> value) {
  fields_.push_back(value ? format_number(*value) : std::string());
  return *this;
}

Row& Row::add(std::int64_t value) {
  fields_.push_back(std::to_string(value));
  return *this;
}

Row& Row::add(std::uint64_t value) {
  fields_.push_back(std::to_string(value));
  return *this;
}

Row& Row::add(std::string_view text) {
  fields_.emplace_back(text);
  return *this;
}

namespace {

void write_fields(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << fields[i];
  }
  os << '\n';
}

}  // namespace

void write_header(std::ostream& os, const std::vector<std::string>& columns) {
  write_fields(os, columns);
}

void write_row(std::ostream& os, const Row& row) { write_fields(os, row.fields()); }

std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace trustmarket::csv
