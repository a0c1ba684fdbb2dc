#ifndef EPIDDE_SRC_FORMAT_HPP
#define EPIDDE_SRC_FORMAT_HPP

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace epidde::detail {

// Locale-independent shortest-faithful decimal at the given significance.
inline std::string format_double(double v, int precision) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v,
                             std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

// Full-consume parse; returns false on trailing garbage or empty input.
inline bool parse_double(std::string_view text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

inline bool parse_int(std::string_view text, int& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

}  // namespace epidde::detail

#endif
