#pragma once

#include <compare>
#include <cstdint>
#include <string_view>

namespace slicesim::radio {

enum class Direction : std::uint8_t { Downlink = 0, Uplink = 1 };

inline constexpr Direction kDirections[] = {Direction::Downlink, Direction::Uplink};

constexpr std::string_view to_string(Direction d) {
    return d == Direction::Downlink ? "DL" : "UL";
}

/// RB availability class. High slices settle first, win remainder ties and
/// never lend their quota while backlogged.
enum class RbAvailability : std::uint8_t { High = 0, Low = 1 };

constexpr std::string_view to_string(RbAvailability a) {
    return a == RbAvailability::High ? "high" : "low";
}

/// Fraction of the PRB grid, held in parts per million so that quota and
/// share-sum arithmetic is exact.
class Share {
public:
    static constexpr std::int64_t kScale = 1'000'000;

    constexpr Share() = default;

    static constexpr Share from_ppm(std::int64_t ppm) { return Share(ppm); }
    /// Rounds to the nearest ppm. Throws std::invalid_argument outside [0, 1].
    static Share from_fraction(double fraction);

    constexpr std::int64_t ppm() const { return ppm_; }
    constexpr double fraction() const { return static_cast<double>(ppm_) / kScale; }

    constexpr Share operator+(Share o) const { return Share(ppm_ + o.ppm_); }
    constexpr Share operator-(Share o) const { return Share(ppm_ - o.ppm_); }
    constexpr auto operator<=>(const Share&) const = default;

private:
    constexpr explicit Share(std::int64_t ppm) : ppm_(ppm) {}

    std::int64_t ppm_ = 0;
};

inline constexpr Share kFullShare = Share::from_ppm(Share::kScale);

}  // namespace slicesim::radio
