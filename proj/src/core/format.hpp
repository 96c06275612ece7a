#pragma once

#include <cstdio>
#include <string>

namespace kropina {

/// 17 significant digits: every double round-trips through the text.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace kropina
