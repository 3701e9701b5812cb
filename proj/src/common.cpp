#include "rzlab/common.hpp"

#include <cstdio>

namespace rzlab {

std::string to_string(ComplexPoint s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", s.sigma, s.t);
  return buf;
}

}  // namespace rzlab
