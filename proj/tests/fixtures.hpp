#pragma once

#include <cstdint>
#include <vector>

namespace fixtures {

// Classic pcap, little-endian, nanosecond magic, radiotap link type. One
// record at 1.123456789 s holding a radiotap header with TSFT and a beacon
// from 02:00:00:00:00:01 with TSF 102400 and interval 100 TU. Written byte by
// byte from the file format, not produced by the library's writer.
inline const std::vector<std::uint8_t> kNsMagicBeacon = {
    // global header
    0x4D, 0x3C, 0xB2, 0xA1, // magic (ns)
    0x02, 0x00, 0x04, 0x00, // version 2.4
    0x00, 0x00, 0x00, 0x00, // thiszone
    0x00, 0x00, 0x00, 0x00, // sigfigs
    0xFF, 0xFF, 0x00, 0x00, // snaplen 65535
    0x7F, 0x00, 0x00, 0x00, // link type 127
    // record header
    0x01, 0x00, 0x00, 0x00, // ts_sec 1
    0x15, 0xCD, 0x5B, 0x07, // ts_nsec 123456789
    0x34, 0x00, 0x00, 0x00, // incl_len 52
    0x34, 0x00, 0x00, 0x00, // orig_len 52
    // radiotap: version, pad, length 16, present = TSFT, TSFT = 102400
    0x00, 0x00, 0x10, 0x00, 0x01, 0x00, 0x00, 0x00,
    0x00, 0x90, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00,
    // 802.11 beacon
    0x80, 0x00,                         // frame control
    0x00, 0x00,                         // duration
    0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, // destination
    0x02, 0x00, 0x00, 0x00, 0x00, 0x01, // source
    0x02, 0x00, 0x00, 0x00, 0x00, 0x01, // bssid
    0x10, 0x00,                         // sequence control
    0x00, 0x90, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, // timestamp 102400
    0x64, 0x00,                         // beacon interval 100
    0x01, 0x00,                         // capability: ESS
};

inline constexpr std::int64_t kNsMagicTimestamp = 1'123'456'789;
inline constexpr std::uint64_t kNsMagicTsf = 102'400;

} // namespace fixtures
