#pragma once

#include <string>

namespace vpb {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

}  // namespace vpb
