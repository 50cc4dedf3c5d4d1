#ifndef SLICERISK_IO_HPP
#define SLICERISK_IO_HPP

#include <charconv>
#include <fstream>
#include <string>

#include "slicerisk/errors.hpp"

namespace slicerisk {

// Shortest round-trip decimal form, so emitted CSV/JSON is byte-stable and
// re-parsing recovers the exact double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path);
    return out;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open input file: " + path);
    return in;
}

inline double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw ValidationError("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("cannot parse number '" + text + "' in " + context);
    }
}

} // namespace slicerisk

#endif
