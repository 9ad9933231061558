#pragma once

#include <cstdio>
#include <string>

namespace caplab {

// Decimal rendering used everywhere a double crosses a report boundary:
// 15 significant digits, shortest form ("%.15g").
inline std::string fmt_sig15(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return std::string(buf);
}

// RFC-4180-ish quoting: wrap when the field holds a comma, quote or newline.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace caplab
