#pragma once

#include <string>

namespace sepnmf {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace sepnmf
