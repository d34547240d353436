#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace shotrf {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Strict full-token parse; throws ParseError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

}  // namespace shotrf
