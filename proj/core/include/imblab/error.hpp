#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace imblab {

/// Error thrown by every imblab operation on contract violation or bad input.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void str_append(std::ostringstream&) {}

template <typename T, typename... Rest>
void str_append(std::ostringstream& os, const T& v, const Rest&... rest) {
    os << v;
    str_append(os, rest...);
}

} // namespace detail

// Builds a message from heterogeneous parts: msg("row ", 3, ": bad value").
template <typename... Parts>
std::string msg(const Parts&... parts) {
    std::ostringstream os;
    detail::str_append(os, parts...);
    return os.str();
}

template <typename... Parts>
[[noreturn]] void fail(const Parts&... parts) {
    throw Error(msg(parts...));
}

template <typename... Parts>
void require(bool condition, const Parts&... parts) {
    if (!condition) fail(parts...);
}

} // namespace imblab
