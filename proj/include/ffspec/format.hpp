#pragma once

#include <cstdio>
#include <string>

namespace ffspec {

// 17 significant digits, locale independent
inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace ffspec
