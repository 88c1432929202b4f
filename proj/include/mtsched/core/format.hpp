#pragma once

#include <string>

namespace mts {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace mts
