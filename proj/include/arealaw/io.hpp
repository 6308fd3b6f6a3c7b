#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace arealaw::io {

// Fixed "%.12g" rendering so CSV bytes do not depend on stream state.
std::string num(double x);

void write_row(std::ostream& out, const std::vector<std::string>& cells);

} // namespace arealaw::io
