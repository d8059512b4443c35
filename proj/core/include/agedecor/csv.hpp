#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace agedecor::csv {

// Shortest representation that parses back to the identical double.
std::string format_double(double v);

std::string format_int(long long v);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::vector<std::string_view> split_line(std::string_view line);

}  // namespace agedecor::csv
