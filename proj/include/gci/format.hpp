#pragma once

#include <string>

namespace gci {

// Shortest decimal form that round-trips to the same double; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);

}  // namespace gci
