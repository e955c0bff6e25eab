#pragma once

#include <cstdio>
#include <string>

namespace chemo {

/// Round-trippable, locale-independent text form of a double.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace chemo
