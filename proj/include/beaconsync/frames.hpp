#pragma once

#include "beaconsync/time.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace beaconsync {

using Octets = std::vector<std::uint8_t>;

/// Raised by binary decoders on short or malformed input.
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MacAddress {
    std::array<std::uint8_t, 6> octets{};

    /// Accepts "aa:bb:cc:dd:ee:ff" (also '-' separated). Throws std::invalid_argument.
    static MacAddress parse(const std::string& text);
    std::string to_string() const;
    std::uint64_t as_u64() const;

    friend auto operator<=>(const MacAddress&, const MacAddress&) = default;
};

/// One TU is 1024 microseconds.
constexpr std::int64_t kTimeUnitUs = 1024;
/// Default beacon interval in TU (102.4 ms).
constexpr std::uint16_t kDefaultBeaconIntervalTu = 100;

/// Frame-control value of a beacon: type 0 (management), subtype 8.
constexpr std::uint16_t kBeaconFrameControl = 0x0080;

constexpr std::size_t kMacHeaderLen = 24;
constexpr std::size_t kBeaconFixedLen = 12;

/// The management header and fixed beacon fields, with the information
/// elements that follow kept as opaque octets.
struct BeaconFrame {
    std::uint16_t frame_control = 0;
    std::uint16_t duration = 0;
    MacAddress destination;
    MacAddress source;
    MacAddress bssid;
    std::uint16_t seq_ctl = 0;
    std::uint64_t timestamp = 0; // TSF, microseconds since AP power-on
    std::uint16_t beacon_interval = 0; // TU
    std::uint16_t capability_info = 0;
    Octets trailing_ies;

    friend bool operator==(const BeaconFrame&, const BeaconFrame&) = default;
};

/// Builds a broadcast beacon from `bssid` with the given TSF and interval.
BeaconFrame make_beacon(const MacAddress& bssid, std::uint64_t tsf, std::uint16_t interval_tu,
                        std::uint16_t seq_ctl = 0);

Octets encode_beacon(const BeaconFrame& frame);

/// Throws DecodeError("truncated: <field>") naming the first incomplete field.
BeaconFrame decode_beacon(std::span<const std::uint8_t> bytes);

/// True for frame-control type management, subtype beacon.
constexpr bool is_beacon(std::uint16_t frame_control)
{
    const unsigned type = (frame_control >> 2) & 0x3;
    const unsigned subtype = (frame_control >> 4) & 0xF;
    return type == 0 && subtype == 8;
}

/// Microseconds from `earlier` to `later`, modulo 2^64.
constexpr std::uint64_t tsf_delta(std::uint64_t earlier, std::uint64_t later)
{
    return later - earlier;
}

constexpr std::uint64_t beacon_interval_us(std::uint16_t interval_tu)
{
    return static_cast<std::uint64_t>(interval_tu) * kTimeUnitUs;
}

/// Number of beacon intervals inside which successive TSF values are taken
/// to come from the same AP power cycle.
constexpr std::uint64_t kPlausibilityIntervals = 10;

constexpr std::uint64_t plausibility_window_us(std::uint16_t interval_tu)
{
    return kPlausibilityIntervals * beacon_interval_us(interval_tu);
}

/// A beacon as seen by one receiver: its TSF paired with the receiver's local clock.
struct BeaconObservation {
    MacAddress bssid;
    std::uint64_t tsf = 0;
    SimTime local_rx_time;

    friend bool operator==(const BeaconObservation&, const BeaconObservation&) = default;
};

/// Key identifying one beacon transmission.
struct BeaconKey {
    MacAddress bssid;
    std::uint64_t tsf = 0;

    friend auto operator<=>(const BeaconKey&, const BeaconKey&) = default;
};

} // namespace beaconsync
