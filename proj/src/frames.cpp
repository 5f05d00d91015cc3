#include "beaconsync/frames.hpp"

#include "byte_io.hpp"

#include <cstdio>

namespace beaconsync {

MacAddress MacAddress::parse(const std::string& text)
{
    MacAddress mac;
    unsigned v[6];
    char sep[5];
    char tail;
    int n = std::sscanf(text.c_str(), "%2x%c%2x%c%2x%c%2x%c%2x%c%2x%c", &v[0], &sep[0], &v[1], &sep[1], &v[2],
                        &sep[2], &v[3], &sep[3], &v[4], &sep[4], &v[5], &tail);
    if (n != 11 || text.size() != 17) throw std::invalid_argument("invalid MAC address '" + text + "'");
    for (char c : sep) {
        if (c != sep[0] || (c != ':' && c != '-')) throw std::invalid_argument("invalid MAC address '" + text + "'");
    }
    for (int i = 0; i < 6; ++i) mac.octets[i] = static_cast<std::uint8_t>(v[i]);
    return mac;
}

std::string MacAddress::to_string() const
{
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", octets[0], octets[1], octets[2], octets[3],
                  octets[4], octets[5]);
    return buf;
}

std::uint64_t MacAddress::as_u64() const
{
    std::uint64_t v = 0;
    for (auto o : octets) v = (v << 8) | o;
    return v;
}

BeaconFrame make_beacon(const MacAddress& bssid, std::uint64_t tsf, std::uint16_t interval_tu, std::uint16_t seq_ctl)
{
    BeaconFrame f;
    f.frame_control = kBeaconFrameControl;
    f.destination.octets.fill(0xFF);
    f.source = bssid;
    f.bssid = bssid;
    f.seq_ctl = seq_ctl;
    f.timestamp = tsf;
    f.beacon_interval = interval_tu;
    f.capability_info = 0x0001; // ESS
    return f;
}

Octets encode_beacon(const BeaconFrame& frame)
{
    Octets out;
    out.reserve(kMacHeaderLen + kBeaconFixedLen + frame.trailing_ies.size());
    ByteWriter w(out);
    w.u16(frame.frame_control);
    w.u16(frame.duration);
    w.bytes(frame.destination.octets);
    w.bytes(frame.source.octets);
    w.bytes(frame.bssid.octets);
    w.u16(frame.seq_ctl);
    w.u64(frame.timestamp);
    w.u16(frame.beacon_interval);
    w.u16(frame.capability_info);
    w.bytes(frame.trailing_ies);
    return out;
}

BeaconFrame decode_beacon(std::span<const std::uint8_t> bytes)
{
    ByteReader r(bytes);
    BeaconFrame f;
    f.frame_control = r.u16("frame_control");
    f.duration = r.u16("duration");
    r.bytes_into(f.destination.octets, "destination");
    r.bytes_into(f.source.octets, "source");
    r.bytes_into(f.bssid.octets, "bssid");
    f.seq_ctl = r.u16("seq_ctl");
    f.timestamp = r.u64("timestamp");
    f.beacon_interval = r.u16("beacon_interval");
    f.capability_info = r.u16("capability_info");
    auto rest = r.rest();
    f.trailing_ies.assign(rest.begin(), rest.end());
    return f;
}

} // namespace beaconsync
