#pragma once

#include <string>
#include <string_view>

namespace lpp {

/// Shortest round-trip decimal form ("inf", "-inf", "nan" for non-finite).
std::string format_double(double x);

/// Strict full-string parse; throws ConfigError on junk.
double parse_double(std::string_view text);

}  // namespace lpp
