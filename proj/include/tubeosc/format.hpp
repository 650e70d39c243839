#pragma once

#include <array>
#include <charconv>
#include <string>

namespace tubeosc {

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] inline std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return ec == std::errc{} ? std::string(buf.data(), ptr) : std::string("nan");
}

}  // namespace tubeosc
