#include "doctest.h"

#include "beaconsync/medium.hpp"

#include <cmath>
#include <memory>

using namespace beaconsync;

namespace {

const MacAddress kAp1 = MacAddress::parse("02:00:00:00:00:01");

double sample_std(Link& link, int n, Duration base)
{
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double v = static_cast<double>((*link.sample() - base).count());
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    return std::sqrt(sq / n - mean * mean);
}

} // namespace

TEST_CASE("event queue orders by due time then insertion")
{
    EventQueue<int> q;
    q.schedule(SimTime(10), 1);
    q.schedule(SimTime(5), 2);
    q.schedule(SimTime(10), 3);
    q.schedule(SimTime(5), 4);
    std::vector<int> order;
    while (!q.empty()) order.push_back(q.pop().event);
    CHECK(order == std::vector<int>{2, 4, 1, 3});
}

TEST_CASE("nine default beacons in one second")
{
    const auto s = schedule_beacons(ApModel{kAp1, 100, SimTime(0), 0}, SimTime(1'000'000'000));
    REQUIRE(s.size() == 9);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i].at == SimTime(static_cast<std::int64_t>(i + 1) * 102'400'000));
        CHECK(s[i].tsf == (i + 1) * 102'400);
    }
}

TEST_CASE("20 TU interval spaces beacons 20.48 ms apart")
{
    const auto s = schedule_beacons(ApModel{kAp1, 20, SimTime(0), 0}, SimTime(1'000'000'000));
    REQUIRE(s.size() >= 2);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].at - s[i - 1].at == Duration(20'480'000));
}

TEST_CASE("fast TSF brings beacons earlier in true time")
{
    // Tenth beacon: TSF 1024000 us at 100 ppm fast, i.e. 1.024 s / 1.0001.
    const auto s = schedule_beacons(ApModel{kAp1, 100, SimTime(0), 100'000}, SimTime(2'000'000'000));
    REQUIRE(s.size() >= 10);
    CHECK(s[9].tsf == 1'024'000);
    CHECK(s[9].at == SimTime(1'023'897'611));
}

TEST_CASE("power-on offset shifts the schedule")
{
    const auto s = schedule_beacons(ApModel{kAp1, 100, SimTime(3'000'000), 0}, SimTime(1'000'000'000));
    CHECK(s.front().at == SimTime(105'400'000));
    CHECK(s.front().tsf == 102'400);
}

TEST_CASE("zero jitter delivers to all receivers at once")
{
    LinkModel m;
    m.propagation_delay = Duration(100);
    Link a(m, 1), b(m, 2), c(m, 3);
    std::vector<Link*> links{&a, &b, &c};
    const auto d = deliver_broadcast(links, SimTime(1000));
    REQUIRE(d.size() == 3);
    for (const auto& x : d) CHECK(x.arrival == SimTime(1100));
}

TEST_CASE("certain loss delivers nothing")
{
    LinkModel m;
    m.loss_prob = 1.0;
    Link a(m, 1), b(m, 2);
    std::vector<Link*> links{&a, &b};
    for (int i = 0; i < 100; ++i)
        for (const auto& x : deliver_broadcast(links, SimTime(0))) CHECK_FALSE(x.arrival.has_value());
}

TEST_CASE("jitter has the requested standard deviation")
{
    for (auto dist : {JitterDistribution::gaussian_truncated, JitterDistribution::uniform}) {
        LinkModel m;
        m.propagation_delay = Duration(100);
        m.rx_jitter_std = Duration::us(3);
        m.rx_jitter_dist = dist;
        Link link(m, 77);
        const double s = sample_std(link, 100'000, Duration(100));
        CHECK(std::abs(s - 3000.0) < 150.0);
    }
}

TEST_CASE("delay never undercuts the propagation delay")
{
    LinkModel m;
    m.propagation_delay = Duration(500);
    m.rx_jitter_std = Duration::us(10);
    Link link(m, 8);
    for (int i = 0; i < 10'000; ++i) CHECK(*link.sample() >= Duration(500));
}

TEST_CASE("contention adds bounded bursts")
{
    LinkModel m;
    m.contention = Contention{0.5, Duration::ms(2), Duration::ms(70)};
    Link link(m, 9);
    int bursts = 0;
    for (int i = 0; i < 10'000; ++i) {
        const Duration d = *link.sample();
        CHECK(d <= Duration::ms(70));
        if (d >= Duration::ms(2)) ++bursts;
    }
    CHECK(bursts > 4'500);
    CHECK(bursts < 5'500);
}

TEST_CASE("multicast reaches joined subscribers only")
{
    LinkModel m;
    Link a(m, 1), b(m, 2), c(m, 3);
    std::vector<Subscriber> subs{{&a, true}, {&b, true}, {&c, true}};
    CHECK(deliver_multicast(subs, SimTime(0)).size() == 3);
    subs[1].joined = false;
    const auto d = deliver_multicast(subs, SimTime(0));
    REQUIRE(d.size() == 2);
    CHECK(d[0].receiver == 0);
    CHECK(d[1].receiver == 2);
}

TEST_CASE("links are reproducible from their stream")
{
    LinkModel m;
    m.rx_jitter_std = Duration::us(5);
    m.loss_prob = 0.1;
    Link a(m, 1234), b(m, 1234);
    for (int i = 0; i < 1000; ++i) CHECK(a.sample() == b.sample());
}

TEST_CASE("invalid link models are rejected")
{
    LinkModel m;
    m.loss_prob = 1.5;
    CHECK_THROWS(validate(m));
    m.loss_prob = 0;
    m.propagation_delay = Duration(-1);
    CHECK_THROWS(validate(m));
}

TEST_CASE("trace lines are tab separated")
{
    CHECK(format_trace_line(TraceEvent{SimTime(42), "beacon_tx", "a", "*", "tsf=1"}) == "42\tbeacon_tx\ta\t*\ttsf=1");
}
