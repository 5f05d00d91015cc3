#include "doctest.h"

#include "beaconsync/baseline.hpp"

using namespace beaconsync;

namespace {

// Exchange for a slave that runs `offset` ahead, with the given one-way delays.
TwoWayExchange exchange(std::int64_t offset, std::int64_t down, std::int64_t up, std::int64_t turnaround = 1'000'000)
{
    const std::int64_t t1 = 10'000'000;
    const std::int64_t rx = t1 + down;
    const std::int64_t tx = rx + turnaround;
    return TwoWayExchange{SimTime(t1), SimTime(rx + offset), SimTime(tx + offset), SimTime(tx + up)};
}

} // namespace

TEST_CASE("symmetric delays and equal clocks give zero")
{
    CHECK(ptp_offset_estimate(exchange(0, 2'000'000, 2'000'000)) == Duration(0));
}

TEST_CASE("asymmetry shows up as half its size")
{
    CHECK(ptp_offset_estimate(exchange(0, 1'000'000, 3'000'000)) == Duration(-1'000'000));
}

TEST_CASE("true offset with symmetric delays is recovered")
{
    CHECK(ptp_offset_estimate(exchange(5'000, 700'000, 700'000)) == Duration(5'000));
}

TEST_CASE("twice the estimate is exact for odd asymmetry")
{
    const auto x = exchange(0, 1, 2);
    CHECK(ptp_offset_twice(x) == -1);
    CHECK(ptp_offset_estimate(x) == Duration(-1));
}

TEST_CASE("inconsistent exchanges are rejected")
{
    CHECK_THROWS(validate(TwoWayExchange{SimTime(10), SimTime(0), SimTime(1), SimTime(5)}));
    CHECK_THROWS(validate(TwoWayExchange{SimTime(0), SimTime(5), SimTime(4), SimTime(10)}));
}

TEST_CASE("slave applies the latest complete exchange")
{
    PtpSlave slave;
    CHECK_FALSE(slave.synchronized());
    CHECK_THROWS(slave.master_time(SimTime(0)));

    const auto x = exchange(5'000, 700'000, 700'000);
    PartialExchange p{x.t1, x.t2, x.t3, x.t4};
    REQUIRE(slave.on_exchange(p) == Duration(5'000));
    CHECK(slave.master_time(SimTime(1'000'000)) == SimTime(995'000));

    PartialExchange lost{x.t1, x.t2, std::nullopt, std::nullopt};
    CHECK_FALSE(slave.on_exchange(lost).has_value());
    CHECK(slave.completed() == 1);
    CHECK(slave.incomplete() == 1);
    CHECK(slave.master_time(SimTime(1'000'000)) == SimTime(995'000));
}
