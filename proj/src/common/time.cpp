#include "slicesim/common/time.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace slicesim {

SimTime parse_duration(std::string_view text) {
    double scale = 1.0;
    std::string_view number = text;
    if (text.ends_with("ms")) {
        scale = 1e-3;
        number = text.substr(0, text.size() - 2);
    } else if (text.ends_with("us")) {
        scale = 1e-6;
        number = text.substr(0, text.size() - 2);
    } else if (text.ends_with("s")) {
        number = text.substr(0, text.size() - 1);
    }
    double value = 0.0;
    const auto* end = number.data() + number.size();
    auto [ptr, ec] = std::from_chars(number.data(), end, value);
    if (number.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw std::invalid_argument("bad duration: " + std::string(text));
    }
    return from_seconds(value * scale);
}

}  // namespace slicesim
