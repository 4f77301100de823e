#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace pevdr::csv {

// Splits one line on commas; fields are whitespace-trimmed.
std::vector<std::string> split_fields(const std::string& line);

// Strict decimal parse ('.' separator); nullopt on anything else.
std::optional<double> parse_number(const std::string& field);

// Reads all non-blank lines.
std::vector<std::string> read_lines(std::istream& in);

// Formats a double so it round-trips through parse_number bit-exactly.
std::string format_number(double v);

} // namespace pevdr::csv
