#include "beaconsync/ingest.hpp"

#include "byte_io.hpp"

#include <array>

namespace beaconsync {

namespace {

constexpr std::size_t kGlobalHeaderLen = 24;
constexpr std::size_t kRecordHeaderLen = 16;
constexpr std::uint32_t kRadiotapTsftBit = 1U << 0;
constexpr std::uint32_t kRadiotapExtBit = 1U << 31;

std::uint32_t bswap(std::uint32_t v)
{
    return __builtin_bswap32(v);
}

void put_u32(std::ostream& out, std::uint32_t v, bool big_endian)
{
    if (big_endian) v = bswap(v);
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
    out.write(b.data(), 4);
}

void put_u16(std::ostream& out, std::uint16_t v, bool big_endian)
{
    if (big_endian) v = static_cast<std::uint16_t>((v >> 8) | (v << 8));
    const char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

} // namespace

PcapReader::PcapReader(const std::filesystem::path& path) : in_(path, std::ios::binary)
{
    if (!in_) throw PcapFormatError("cannot open " + path.string());
    std::array<std::uint8_t, kGlobalHeaderLen> hdr{};
    if (!in_.read(reinterpret_cast<char*>(hdr.data()), hdr.size()))
        throw PcapFormatError("truncated pcap global header in " + path.string());

    const std::uint32_t raw = static_cast<std::uint32_t>(hdr[0]) | static_cast<std::uint32_t>(hdr[1]) << 8 |
                              static_cast<std::uint32_t>(hdr[2]) << 16 | static_cast<std::uint32_t>(hdr[3]) << 24;
    if (raw == kPcapMagicMicro || raw == kPcapMagicNano) {
        swapped_ = false;
    } else if (bswap(raw) == kPcapMagicMicro || bswap(raw) == kPcapMagicNano) {
        swapped_ = true;
    } else {
        throw PcapFormatError("bad pcap magic (pcapng is not supported)");
    }
    const std::uint32_t magic = swapped_ ? bswap(raw) : raw;
    unit_ = magic == kPcapMagicNano ? PcapTimestampUnit::nano : PcapTimestampUnit::micro;
    if (u32(hdr.data() + 20) != kLinkTypeRadiotap) throw PcapFormatError("expected radiotap link type (127)");
}

std::uint32_t PcapReader::u32(const std::uint8_t* p) const
{
    std::uint32_t v = static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
                      static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
    return swapped_ ? bswap(v) : v;
}

std::optional<CaptureRecord> PcapReader::next()
{
    if (done_) return std::nullopt;
    std::array<std::uint8_t, kRecordHeaderLen> rec{};
    in_.read(reinterpret_cast<char*>(rec.data()), rec.size());
    if (in_.gcount() == 0) {
        done_ = true;
        return std::nullopt;
    }
    if (static_cast<std::size_t>(in_.gcount()) < rec.size()) {
        ++truncated_;
        done_ = true;
        return std::nullopt;
    }
    const std::uint32_t sec = u32(rec.data());
    const std::uint32_t frac = u32(rec.data() + 4);
    const std::uint32_t incl = u32(rec.data() + 8);

    Octets packet(incl);
    in_.read(reinterpret_cast<char*>(packet.data()), incl);
    if (static_cast<std::uint32_t>(in_.gcount()) < incl) {
        ++truncated_;
        done_ = true;
        return std::nullopt;
    }
    const std::int64_t frac_ns = unit_ == PcapTimestampUnit::nano ? frac : static_cast<std::int64_t>(frac) * 1000;
    const SimTime ts = SimTime(0) + Duration::s(sec) + Duration(frac_ns);
    return parse_radiotap_packet(ts, packet);
}

std::vector<CaptureRecord> read_pcap(const std::filesystem::path& path)
{
    PcapReader reader(path);
    std::vector<CaptureRecord> out;
    while (auto r = reader.next()) out.push_back(std::move(*r));
    return out;
}

CaptureRecord parse_radiotap_packet(SimTime pcap_ts, std::span<const std::uint8_t> packet)
{
    CaptureRecord rec;
    rec.pcap_ts = pcap_ts;
    auto malformed = [&] {
        rec.malformed_radiotap = true;
        rec.radiotap_len = 0;
        rec.mac_timestamp.reset();
        rec.frame_bytes.assign(packet.begin(), packet.end());
        return rec;
    };
    try {
        ByteReader r(packet);
        const auto version = r.u8("radiotap version");
        r.u8("radiotap pad");
        const auto len = r.u16("radiotap length");
        if (version != 0 || len < 8 || len > packet.size()) return malformed();

        ByteReader hdr(packet.first(len));
        hdr.take(4, "radiotap fixed header");
        const std::uint32_t first = hdr.u32("radiotap present");
        std::uint32_t word = first;
        while (word & kRadiotapExtBit) word = hdr.u32("radiotap present");

        if (first & kRadiotapTsftBit) {
            const std::size_t pos = hdr.position();
            const std::size_t aligned = (pos + 7) & ~static_cast<std::size_t>(7);
            hdr.take(aligned - pos, "radiotap TSFT alignment");
            rec.mac_timestamp = hdr.u64("radiotap TSFT");
        }
        rec.radiotap_len = len;
        auto frame = packet.subspan(len);
        rec.frame_bytes.assign(frame.begin(), frame.end());
        return rec;
    } catch (const DecodeError&) {
        return malformed();
    }
}

Octets encode_radiotap(std::optional<std::uint64_t> tsft)
{
    Octets out;
    ByteWriter w(out);
    w.u8(0);
    w.u8(0);
    w.u16(static_cast<std::uint16_t>(tsft ? 16 : 8));
    w.u32(tsft ? kRadiotapTsftBit : 0);
    if (tsft) w.u64(*tsft);
    return out;
}

CaptureRecord beacon_capture(const BeaconFrame& frame, SimTime rx_time, std::optional<std::uint64_t> tsft)
{
    CaptureRecord rec;
    rec.pcap_ts = rx_time;
    rec.radiotap_len = static_cast<std::uint16_t>(tsft ? 16 : 8);
    rec.mac_timestamp = tsft;
    rec.frame_bytes = encode_beacon(frame);
    return rec;
}

void write_pcap(const std::filesystem::path& path, const std::vector<CaptureRecord>& records,
                PcapWriteOptions options)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PcapFormatError("cannot write " + path.string());
    const bool be = options.big_endian;
    put_u32(out, options.unit == PcapTimestampUnit::nano ? kPcapMagicNano : kPcapMagicMicro, be);
    put_u16(out, 2, be);
    put_u16(out, 4, be);
    put_u32(out, 0, be);
    put_u32(out, 0, be);
    put_u32(out, 65535, be);
    put_u32(out, kLinkTypeRadiotap, be);

    for (const auto& rec : records) {
        const std::int64_t ns = rec.pcap_ts.nanos();
        if (ns < 0) throw std::invalid_argument("pcap timestamps must be >= 0");
        const std::int64_t sec = ns / 1'000'000'000;
        const std::int64_t sub = ns % 1'000'000'000;
        std::uint32_t frac;
        if (options.unit == PcapTimestampUnit::nano) {
            frac = static_cast<std::uint32_t>(sub);
        } else {
            if (sub % 1000 != 0) throw std::invalid_argument("microsecond pcap needs whole-microsecond timestamps");
            frac = static_cast<std::uint32_t>(sub / 1000);
        }
        Octets packet = rec.malformed_radiotap ? Octets{} : encode_radiotap(rec.mac_timestamp);
        packet.insert(packet.end(), rec.frame_bytes.begin(), rec.frame_bytes.end());
        put_u32(out, static_cast<std::uint32_t>(sec), be);
        put_u32(out, frac, be);
        put_u32(out, static_cast<std::uint32_t>(packet.size()), be);
        put_u32(out, static_cast<std::uint32_t>(packet.size()), be);
        out.write(reinterpret_cast<const char*>(packet.data()), static_cast<std::streamsize>(packet.size()));
    }
    if (!out) throw PcapFormatError("write failed for " + path.string());
}

ExtractResult extract_beacons(const std::vector<CaptureRecord>& records, const std::optional<MacAddress>& bssid_filter)
{
    ExtractResult result;
    for (const auto& rec : records) {
        if (rec.malformed_radiotap) {
            ++result.counters.malformed;
            continue;
        }
        if (rec.frame_bytes.size() < 2) {
            ++result.counters.malformed;
            continue;
        }
        const std::uint16_t fc = static_cast<std::uint16_t>(rec.frame_bytes[0] | (rec.frame_bytes[1] << 8));
        if (!is_beacon(fc)) {
            ++result.counters.non_beacon;
            continue;
        }
        BeaconFrame frame;
        try {
            frame = decode_beacon(rec.frame_bytes);
        } catch (const DecodeError&) {
            ++result.counters.malformed;
            continue;
        }
        if (bssid_filter && frame.bssid != *bssid_filter) {
            ++result.counters.filtered;
            continue;
        }
        ++result.counters.beacons;
        result.observations.push_back(BeaconObservation{frame.bssid, frame.timestamp, rec.pcap_ts});
    }
    return result;
}

AlignmentResult align_captures(const std::vector<BeaconObservation>& reference,
                               const std::vector<BeaconObservation>& station, std::optional<MacAddress> bssid_filter)
{
    AlignmentResult result;
    if (!bssid_filter) {
        if (reference.empty()) throw std::invalid_argument("reference capture contains no beacons");
        bssid_filter = reference.front().bssid;
    }
    result.bssid = *bssid_filter;

    ReferenceStation ref(ReferenceStation::Config{.publisher_id = 1, .bssid_filter = bssid_filter});
    StationSync sta(StationSync::Config{.bssid_filter = *bssid_filter});

    auto deliver_tuple = [&](const BeaconObservation& obs) {
        auto msg = ref.on_beacon(obs, obs.local_rx_time);
        if (!msg) return;
        const auto fields = tuple_fields(decode_network_message(encode_network_message(*msg)));
        const auto bssid = ref.directory().bssid_for(fields.dataset_writer_id);
        const auto prior = sta.last_correction();
        auto c = sta.on_tuple(TimestampTuple{fields.t_bf, fields.t_tsn_at_bf, *bssid});
        if (!c) return;
        AlignedBeacon a{c->bssid, c->t_bf, c->t_tsn_at_bf, c->t_station_at_bf, std::nullopt};
        if (prior) {
            const SimTime predicted = apply_correction(prior->t_tsn_at_bf, prior->t_station_at_bf, c->t_station_at_bf);
            a.prediction_error_ns = (predicted - c->t_tsn_at_bf).count();
        }
        result.beacons.push_back(a);
    };

    // Merge the two file-ordered streams by TSF; on equal TSF the station's
    // observation goes first so the tuple finds it.
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < reference.size() || j < station.size()) {
        const bool take_station =
            j < station.size() && (i >= reference.size() || station[j].tsf <= reference[i].tsf);
        if (take_station) {
            sta.on_beacon(station[j++]);
        } else {
            deliver_tuple(reference[i++]);
        }
    }
    result.station_counters = sta.counters();
    result.reference_counters = ref.counters();
    return result;
}

} // namespace beaconsync
