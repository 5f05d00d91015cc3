#include "doctest.h"

#include "beaconsync/frames.hpp"
#include "beaconsync/rng.hpp"

using namespace beaconsync;

namespace {

BeaconFrame zero_frame()
{
    return BeaconFrame{};
}

} // namespace

TEST_CASE("all-zero frame encodes to 36 zero octets")
{
    const Octets bytes = encode_beacon(zero_frame());
    CHECK(bytes == Octets(36, 0x00));
}

TEST_CASE("timestamp is little-endian at the start of the body")
{
    BeaconFrame f;
    f.timestamp = 0x0102030405060708ULL;
    const Octets bytes = encode_beacon(f);
    const Octets body(bytes.begin() + kMacHeaderLen, bytes.begin() + kMacHeaderLen + 8);
    CHECK(body == Octets{0x08, 0x07, 0x06, 0x05, 0x04, 0x03, 0x02, 0x01});
}

TEST_CASE("beacon interval sits at body offset 8")
{
    BeaconFrame f;
    f.beacon_interval = 100;
    const Octets bytes = encode_beacon(f);
    CHECK(bytes[kMacHeaderLen + 8] == 0x64);
    CHECK(bytes[kMacHeaderLen + 9] == 0x00);
}

TEST_CASE("interval octets 64 00 decode to 102.4 ms")
{
    Octets bytes(36, 0x00);
    bytes[kMacHeaderLen + 8] = 0x64;
    const BeaconFrame f = decode_beacon(bytes);
    CHECK(f.beacon_interval == 100);
    CHECK(beacon_interval_us(f.beacon_interval) == 102'400);
}

TEST_CASE("35-octet input names the missing field")
{
    const Octets bytes(35, 0x00);
    try {
        decode_beacon(bytes);
        FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
        CHECK(std::string(e.what()) == "truncated: capability_info");
    }
}

TEST_CASE("truncation inside the header names the field")
{
    CHECK_THROWS_WITH_AS(decode_beacon(Octets{}), "truncated: frame_control", DecodeError);
    CHECK_THROWS_WITH_AS(decode_beacon(Octets(10, 0)), "truncated: source", DecodeError);
    CHECK_THROWS_WITH_AS(decode_beacon(Octets(30, 0)), "truncated: timestamp", DecodeError);
}

TEST_CASE("random frames round-trip")
{
    Rng rng(stream_id({2024, 1}));
    for (int i = 0; i < 2000; ++i) {
        BeaconFrame f;
        f.frame_control = static_cast<std::uint16_t>(rng.next_u64());
        f.duration = static_cast<std::uint16_t>(rng.next_u64());
        for (auto* m : {&f.destination, &f.source, &f.bssid})
            for (auto& o : m->octets) o = static_cast<std::uint8_t>(rng.next_u64());
        f.seq_ctl = static_cast<std::uint16_t>(rng.next_u64());
        f.timestamp = rng.next_u64();
        f.beacon_interval = static_cast<std::uint16_t>(rng.next_u64());
        f.capability_info = static_cast<std::uint16_t>(rng.next_u64());
        f.trailing_ies.resize(static_cast<std::size_t>(rng.uniform_int(0, 64)));
        for (auto& o : f.trailing_ies) o = static_cast<std::uint8_t>(rng.next_u64());
        CHECK(decode_beacon(encode_beacon(f)) == f);
    }
}

TEST_CASE("make_beacon builds a broadcast beacon")
{
    const auto bssid = MacAddress::parse("02:00:00:00:00:01");
    const BeaconFrame f = make_beacon(bssid, 102'400, 100);
    CHECK(is_beacon(f.frame_control));
    CHECK(f.bssid == bssid);
    CHECK(f.source == bssid);
    CHECK(f.destination == MacAddress::parse("ff:ff:ff:ff:ff:ff"));
    CHECK(f.timestamp == 102'400);
}

TEST_CASE("frame-control classification")
{
    CHECK(is_beacon(0x0080));
    CHECK_FALSE(is_beacon(0x0050)); // probe response
    CHECK_FALSE(is_beacon(0x0088)); // data
}

TEST_CASE("TSF deltas are modular")
{
    CHECK(tsf_delta(5, 10) == 5);
    CHECK(tsf_delta(UINT64_MAX, 4) == 5);
    CHECK(tsf_delta(0, 102'400) == 102'400);
    CHECK(tsf_delta(0, 102'400) == beacon_interval_us(kDefaultBeaconIntervalTu));
    CHECK(plausibility_window_us(100) == 1'024'000);
}

TEST_CASE("MAC addresses parse and print")
{
    const auto m = MacAddress::parse("02-0A-bc-00-00-ff");
    CHECK(m.to_string() == "02:0a:bc:00:00:ff");
    CHECK(m.as_u64() == 0x020ABC0000FFULL);
    CHECK_THROWS(MacAddress::parse("02:00:00:00:00"));
    CHECK_THROWS(MacAddress::parse("zz:00:00:00:00:00"));
}
