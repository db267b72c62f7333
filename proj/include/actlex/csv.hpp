#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace actlex::csv {

// Minimal RFC 4180 handling: quoted fields, doubled quotes, no embedded newlines.
std::vector<std::string> split_line(std::string_view line, char delim = ',');
std::string quote(std::string_view field, char delim = ',');
void write_row(std::ostream& out, const std::vector<std::string>& fields, char delim = ',');

std::string trim(std::string_view s);
std::string lower(std::string_view s);

// Strict decimal parse; throws ParseError with context on failure.
double parse_double(std::string_view s, std::string_view context);
// Shortest representation that round-trips exactly.
std::string format_double(double x);

}  // namespace actlex::csv
