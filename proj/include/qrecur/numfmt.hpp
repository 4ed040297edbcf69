#pragma once

#include <fmt/format.h>

#include <string>

namespace qrecur {

// Shortest text that round-trips the double; "inf", "-inf", "nan" otherwise.
inline std::string num(double x) { return fmt::format("{}", x); }

}  // namespace qrecur
