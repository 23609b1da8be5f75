#pragma once

#include <cstdio>
#include <string>

namespace nlqs {

// Numbers in data files: 12 significant digits.
inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace nlqs
