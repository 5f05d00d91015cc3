#pragma once

// Classic pcap (not pcapng) with 802.11 + radiotap link type. Both timestamp
// resolutions (microsecond and nanosecond magic) and both byte orders.

#include "beaconsync/frames.hpp"
#include "beaconsync/protocol.hpp"
#include "beaconsync/time.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <vector>

namespace beaconsync {

constexpr std::uint32_t kPcapMagicMicro = 0xA1B2C3D4;
constexpr std::uint32_t kPcapMagicNano = 0xA1B23C4D;
constexpr std::uint32_t kLinkTypeRadiotap = 127;

/// Bad magic, wrong link type or unreadable file.
class PcapFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CaptureRecord {
    SimTime pcap_ts;
    std::uint16_t radiotap_len = 0;
    std::optional<std::uint64_t> mac_timestamp; // radiotap TSFT, microseconds
    Octets frame_bytes;                         // 802.11 frame after the radiotap header
    bool malformed_radiotap = false;            // frame_bytes then holds the whole packet

    friend bool operator==(const CaptureRecord&, const CaptureRecord&) = default;
};

enum class PcapTimestampUnit { micro, nano };

/// Streaming reader; records are yielded in file order.
class PcapReader {
public:
    explicit PcapReader(const std::filesystem::path& path);

    std::optional<CaptureRecord> next();

    PcapTimestampUnit unit() const { return unit_; }
    bool big_endian() const { return swapped_; }
    /// Records cut short by end of file; reading stops at the first one.
    std::uint64_t truncated() const { return truncated_; }

private:
    std::uint32_t u32(const std::uint8_t* p) const;

    std::ifstream in_;
    PcapTimestampUnit unit_ = PcapTimestampUnit::micro;
    bool swapped_ = false;
    bool done_ = false;
    std::uint64_t truncated_ = 0;
};

std::vector<CaptureRecord> read_pcap(const std::filesystem::path& path);

/// Splits a raw radiotap packet into the record fields.
CaptureRecord parse_radiotap_packet(SimTime pcap_ts, std::span<const std::uint8_t> packet);

/// Minimal radiotap header: version 0, optional TSFT field.
Octets encode_radiotap(std::optional<std::uint64_t> tsft);

struct PcapWriteOptions {
    PcapTimestampUnit unit = PcapTimestampUnit::nano;
    bool big_endian = false;
};

/// Writes records as radiotap packets. Timestamps must be >= 0 and, for the
/// microsecond format, whole microseconds.
void write_pcap(const std::filesystem::path& path, const std::vector<CaptureRecord>& records,
                PcapWriteOptions options = {});

CaptureRecord beacon_capture(const BeaconFrame& frame, SimTime rx_time, std::optional<std::uint64_t> tsft);

struct ExtractCounters {
    std::uint64_t beacons = 0;
    std::uint64_t non_beacon = 0;
    std::uint64_t malformed = 0;
    std::uint64_t filtered = 0;
};

struct ExtractResult {
    std::vector<BeaconObservation> observations;
    ExtractCounters counters;
};

/// Beacon frames only, BSSID-filtered, paired with the capture timestamp.
ExtractResult extract_beacons(const std::vector<CaptureRecord>& records,
                              const std::optional<MacAddress>& bssid_filter = std::nullopt);

struct AlignedBeacon {
    MacAddress bssid;
    std::uint64_t tsf = 0;
    SimTime reference_time;
    SimTime station_time;
    /// Offset correction at the previous matched beacon applied to this
    /// beacon's station time, minus this beacon's reference time.
    std::optional<std::int64_t> prediction_error_ns;
};

struct AlignmentResult {
    MacAddress bssid;
    std::vector<AlignedBeacon> beacons;
    StationCounters station_counters;
    ReferenceCounters reference_counters;
};

/// Pairs reference and station observations by (bssid, tsf) through the
/// ReferenceStation/StationSync path. Without a filter the first BSSID in
/// the reference stream is used.
AlignmentResult align_captures(const std::vector<BeaconObservation>& reference,
                               const std::vector<BeaconObservation>& station,
                               std::optional<MacAddress> bssid_filter = std::nullopt);

} // namespace beaconsync
