#include "doctest.h"

#include "beaconsync/simulation.hpp"

#include <filesystem>

using namespace beaconsync;

namespace {

const std::string kBase = R"({
  "name": "sim",
  "duration": "20s",
  "seed": 3,
  "aps": [ { "bssid": "02:00:00:00:00:01", "tsf_origin": "1ms", "tsf_drift_ppb": 5000 } ],
  "reference": {
    "timestamp_granularity": "1ns",
    "gptp": { "bound": "0ns" },
    "beacon_link": { "propagation_delay": "0ns", "jitter_std": "0ns" }
  },
  "stations": [
    {
      "id": "sta1",
      "clock": { "offset": "3s", "drift_ppb": 0, "granularity": "1ns" },
      "beacon_link": { "propagation_delay": "0ns", "jitter_std": "0ns" },
      "bssid_filter": "02:00:00:00:00:01"
    }
  ],
  "pubsub_link": { "propagation_delay": "PUBSUB", "jitter_std": "0ns" }
})";

ScenarioConfig with_pubsub(const std::string& delay)
{
    std::string text = kBase;
    text.replace(text.find("PUBSUB"), 6, delay);
    return parse_scenario(text);
}

std::size_t count_type(const RunResult& r, const std::string& type)
{
    std::size_t n = 0;
    for (const auto& e : r.trace) n += e.type == type;
    return n;
}

} // namespace

TEST_CASE("zero jitter gives zero error at every tick")
{
    const auto r = run_scenario(with_pubsub("200us"));
    REQUIRE(!r.samples.empty());
    for (const auto& s : r.samples) CHECK(s.error_ns == 0);
    for (const auto& c : r.corrections) CHECK(c.error_at_beacon_ns == 0);
}

TEST_CASE("a slow pubsub link delays the correction but not its accuracy")
{
    const auto fast = run_scenario(with_pubsub("200us"));
    const auto slow = run_scenario(with_pubsub("50ms"));
    REQUIRE(!slow.samples.empty());
    for (const auto& s : slow.samples) CHECK(s.error_ns == 0);
    REQUIRE(!fast.corrections.empty());
    CHECK(slow.corrections.front().at - fast.corrections.front().at == Duration(49'800'000));
    CHECK(slow.samples.size() < fast.samples.size());
}

TEST_CASE("every transmitted beacon is received or lost at each receiver")
{
    auto cfg = with_pubsub("200us");
    cfg.stations[0].beacon_link.loss_prob = 0.2;
    cfg.reference.beacon_link.loss_prob = 0.1;
    const auto r = run_scenario(cfg);
    const auto sent = r.counters.at("beacons_sent");
    CHECK(sent == count_type(r, "beacon_tx"));
    for (const std::string rx : {"reference", "sta1"}) {
        const auto got = r.counters.count("rx." + rx + ".beacons_received") ? r.counters.at("rx." + rx + ".beacons_received") : 0;
        const auto lost = r.counters.count("rx." + rx + ".beacons_lost") ? r.counters.at("rx." + rx + ".beacons_lost") : 0;
        CHECK(got + lost == sent);
    }
}

TEST_CASE("one sample per station per tick once synchronized")
{
    auto cfg = with_pubsub("200us");
    cfg.method = Method::both;
    const auto r = run_scenario(cfg);
    std::map<std::pair<std::string, std::int64_t>, int> per_tick;
    for (const auto& s : r.samples) {
        CHECK(s.at.nanos() % 10'000'000 == 0);
        CHECK(++per_tick[{s.method, s.at.nanos()}] == 1);
    }
}

TEST_CASE("baseline error equals half the delay asymmetry per exchange")
{
    auto cfg = with_pubsub("200us");
    cfg.method = Method::ptp_baseline;
    cfg.baseline.timestamp_granularity = Duration(1);
    cfg.baseline.downlink.rx_jitter_std = Duration::us(300);
    cfg.baseline.uplink.rx_jitter_std = Duration::us(500);
    cfg.baseline.stack.rx_jitter_std = Duration::us(100);
    const auto r = run_scenario(cfg);
    REQUIRE(r.exchanges.size() > 10);
    for (const auto& x : r.exchanges) {
        CHECK(x.estimate_twice_ns - 2 * x.true_offset_ns == (x.downlink - x.uplink).count());
    }
}

TEST_CASE("outputs are written where configured")
{
    auto cfg = with_pubsub("200us");
    cfg.output.samples_csv = "s.csv";
    cfg.output.trace = "t.tsv";
    cfg.output.report = "r.json";
    cfg.output.tuple_log = "tuples.bin";
    cfg.output.reference_pcap = "ref.pcap";
    cfg.output.station_pcaps["sta1"] = "sta1.pcap";
    const auto dir = std::filesystem::temp_directory_path() / "beaconsync-sim-out";
    std::filesystem::remove_all(dir);
    const auto r = run_scenario(cfg);
    write_outputs(cfg, r, dir);
    for (const char* f : {"s.csv", "t.tsv", "r.json", "tuples.bin", "ref.pcap", "sta1.pcap"})
        CHECK(std::filesystem::exists(dir / f));
    CHECK(read_pcap(dir / "ref.pcap") == r.reference_capture);
    CHECK(split_records(r.tuple_log).size() == r.counters.at("tuples_sent"));
}
