#pragma once

#include <cstdio>
#include <string>

namespace flexq {

/// Real number with 12 significant digits, as used in every CSV output.
inline std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
    return buf;
}

}  // namespace flexq
