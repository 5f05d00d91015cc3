#include "doctest.h"

#include "beaconsync/protocol.hpp"

using namespace beaconsync;

namespace {

const MacAddress kAp1 = MacAddress::parse("02:00:00:00:00:01");
const MacAddress kAp2 = MacAddress::parse("02:00:00:00:00:02");
constexpr std::uint64_t kBi = 102'400;

StationSync station(std::size_t capacity = 32)
{
    StationSync::Config c;
    c.bssid_filter = kAp1;
    c.capacity = capacity;
    return StationSync(c);
}

} // namespace

TEST_CASE("correction with equal timestamps returns the current reading")
{
    CHECK(apply_correction(SimTime(123), SimTime(123), SimTime(987'654)) == SimTime(987'654));
}

TEST_CASE("correction by substitution")
{
    CHECK(apply_correction(SimTime(7'000'000), SimTime(5'000'000), SimTime(6'000'000)) == SimTime(8'000'000));
}

TEST_CASE("reference ignores other BSSIDs when filtered")
{
    ReferenceStation ref({.bssid_filter = kAp1});
    CHECK_FALSE(ref.on_beacon({kAp2, kBi, SimTime(0)}, SimTime(0)).has_value());
    CHECK(ref.counters().filtered == 1);
    CHECK(ref.counters().published == 0);
}

TEST_CASE("reference pairs the beacon with the TSN time")
{
    ReferenceStation ref({.bssid_filter = kAp1});
    const auto msg = ref.on_beacon({kAp1, 102'400, SimTime(7'000'000)}, SimTime(7'000'000));
    REQUIRE(msg.has_value());
    const auto f = tuple_fields(*msg);
    CHECK(f.t_bf == 102'400);
    CHECK(f.t_tsn_at_bf == SimTime(7'000'000));
    CHECK(ref.directory().bssid_for(f.dataset_writer_id) == kAp1);
    CHECK(msg->header.sequence_number == 1);
}

TEST_CASE("reference drops a repeated TSF")
{
    ReferenceStation ref({});
    CHECK(ref.on_beacon({kAp1, kBi, SimTime(1)}, SimTime(1)).has_value());
    CHECK_FALSE(ref.on_beacon({kAp1, kBi, SimTime(2)}, SimTime(2)).has_value());
    CHECK(ref.counters().duplicates == 1);
    CHECK(ref.counters().published == 1);
}

TEST_CASE("reference keeps BSSIDs apart")
{
    ReferenceStation ref({});
    CHECK(ref.on_beacon({kAp1, kBi, SimTime(1)}, SimTime(1)).has_value());
    CHECK(ref.on_beacon({kAp2, kBi, SimTime(2)}, SimTime(2)).has_value());
    CHECK(ref.counters().duplicates == 0);
    CHECK(ref.pending().size() == 2);
}

TEST_CASE("AP restart beyond the window flushes and continues")
{
    ReferenceStation ref({});
    CHECK(ref.on_beacon({kAp1, 50 * kBi, SimTime(1)}, SimTime(1)).has_value());
    CHECK(ref.on_beacon({kAp1, kBi, SimTime(2)}, SimTime(2)).has_value());
    CHECK(ref.counters().restarts == 1);
    CHECK(ref.pending().size() == 1);
}

TEST_CASE("stored observation and matching tuple form a correction")
{
    auto s = station();
    s.on_beacon({kAp1, kBi, SimTime(5'000'000)});
    const auto c = s.on_tuple({kBi, SimTime(7'000'000), kAp1});
    REQUIRE(c.has_value());
    CHECK(c->t_station_at_bf == SimTime(5'000'000));
    CHECK(c->t_tsn_at_bf == SimTime(7'000'000));
    CHECK(s.last_correction() == c);
    CHECK(s.estimate(SimTime(6'000'000)).t_tsn_estimate == SimTime(8'000'000));
    CHECK(s.estimate(SimTime(6'000'000)).age == Duration(1'000'000));
    CHECK(s.counters().matched == 1);
}

TEST_CASE("observations are evicted oldest first")
{
    auto s = station(32);
    for (std::uint64_t k = 1; k <= 33; ++k) s.on_beacon({kAp1, k * kBi, SimTime(static_cast<std::int64_t>(k))});
    const auto snap = s.snapshot();
    REQUIRE(snap.observations.size() == 32);
    CHECK(snap.observations.front().tsf == 2 * kBi);
    CHECK(snap.observations.back().tsf == 33 * kBi);
    CHECK(s.counters().evicted == 1);
    CHECK_FALSE(s.on_tuple({kBi, SimTime(0), kAp1}).has_value());
}

TEST_CASE("observations from other BSSIDs are ignored")
{
    auto s = station();
    const auto before = s.snapshot();
    s.on_beacon({kAp2, kBi, SimTime(1)});
    CHECK(s.snapshot() == before);
    CHECK(s.filtered_beacons() == 1);
    CHECK_FALSE(s.on_tuple({kBi, SimTime(1), kAp2}).has_value());
    CHECK(s.filtered_tuples() == 1);
}

TEST_CASE("tuple for a beacon the station missed")
{
    auto s = station();
    s.on_beacon({kAp1, kBi, SimTime(1)});
    s.on_beacon({kAp1, 3 * kBi, SimTime(3)});
    CHECK_FALSE(s.on_tuple({2 * kBi, SimTime(2), kAp1}).has_value());
    CHECK(s.counters().missed_tuples == 1);
    // Ahead of everything received so far
    CHECK_FALSE(s.on_tuple({4 * kBi, SimTime(4), kAp1}).has_value());
    CHECK(s.counters().missed_tuples == 2);
    CHECK_FALSE(s.synchronized());
}

TEST_CASE("tuple older than the window is stale")
{
    auto s = station();
    s.on_beacon({kAp1, 20 * kBi, SimTime(20)});
    CHECK_FALSE(s.on_tuple({9 * kBi, SimTime(9), kAp1}).has_value());
    CHECK(s.counters().stale_tuples == 1);
    // Exactly ten intervals back is still inside the window
    CHECK_FALSE(s.on_tuple({10 * kBi, SimTime(10), kAp1}).has_value());
    CHECK(s.counters().stale_tuples == 1);
    CHECK(s.counters().missed_tuples == 1);
}

TEST_CASE("no correction means unsynchronized")
{
    auto s = station();
    CHECK_THROWS_AS(s.estimate(SimTime(1)), Unsynchronized);
}

TEST_CASE("estimate before the correction's local time is rejected")
{
    auto s = station();
    s.on_beacon({kAp1, kBi, SimTime(5'000)});
    REQUIRE(s.on_tuple({kBi, SimTime(9'000), kAp1}));
    CHECK_THROWS_AS(s.estimate(SimTime(4'999)), std::domain_error);
}

TEST_CASE("station counts duplicate beacons")
{
    auto s = station();
    s.on_beacon({kAp1, kBi, SimTime(1)});
    s.on_beacon({kAp1, kBi, SimTime(2)});
    CHECK(s.counters().duplicate_beacons == 1);
    CHECK(s.snapshot().observations.size() == 1);
    CHECK(s.snapshot().observations.front().local_rx_time == SimTime(1));
}

TEST_CASE("two-point rate extrapolation removes a constant rate error")
{
    StationSync::Config c;
    c.bssid_filter = kAp1;
    c.two_point_drift = true;
    StationSync s(c);
    // Station clock runs 100 ppm fast.
    s.on_beacon({kAp1, kBi, SimTime(100'010'000)});
    s.on_beacon({kAp1, 2 * kBi, SimTime(200'020'000)});
    REQUIRE(s.on_tuple({kBi, SimTime(100'000'000), kAp1}));
    REQUIRE(s.on_tuple({2 * kBi, SimTime(200'000'000), kAp1}));
    CHECK(s.estimate(SimTime(300'030'000)).t_tsn_estimate == SimTime(300'000'000));
}

TEST_CASE("estimate is exact for any triple")
{
    for (std::int64_t a : {-5'000'000'000LL, 0LL, 7'000'000LL})
        for (std::int64_t b : {-3LL, 5'000'000LL, 9'000'000'000LL})
            for (std::int64_t d : {0LL, 1LL, 102'400'000LL})
                CHECK(apply_correction(SimTime(a), SimTime(b), SimTime(b + d)) == SimTime(a + d));
}
