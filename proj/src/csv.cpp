#include "mrkc/csv.hpp"

#include <charconv>
#include <cmath>

namespace mrkc::csv {

std::string field(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string field(long long x) { return std::to_string(x); }
std::string field(int x) { return std::to_string(x); }
std::string field(bool x) { return x ? "1" : "0"; }

}  // namespace mrkc::csv
