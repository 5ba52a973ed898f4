#include "xicorr/format.hpp"

#include <charconv>

namespace xicorr {

std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

}  // namespace xicorr
