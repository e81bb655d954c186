#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fmb::csv {

/// Splits one CSV record; double-quoted fields may contain commas and "".
std::vector<std::string> split_record(std::string_view line);
/// Quotes a field when it contains a comma, quote or leading/trailing space.
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

/// Lines of `text` with trailing '\r' removed.
std::vector<std::string> lines(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Shortest round-tripping decimal form of a double.
std::string format_double(double v);
double parse_double(std::string_view s, std::string_view context);
long long parse_int(std::string_view s, std::string_view context);

}  // namespace fmb::csv
