#pragma once

#include <ostream>
#include <string>

namespace mrkc::csv {

// Shortest round-trip decimal for a double ("inf"/"nan" spelled out).
std::string field(double x);
std::string field(long long x);
std::string field(int x);
std::string field(bool x);

}  // namespace mrkc::csv
