#include "doctest.h"

#include "beaconsync/scenario.hpp"

#include <filesystem>
#include <string>

using namespace beaconsync;

namespace {

const std::string kMinimal = R"({
  "name": "t",
  "duration": "1s",
  "aps": [ { "bssid": "02:00:00:00:00:01" } ],
  "reference": {},
  "stations": [ { "id": "sta1", "bssid_filter": "02:00:00:00:00:01" } ]
})";

std::string error_of(const std::string& text)
{
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to)
{
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

} // namespace

TEST_CASE("minimal scenario gets defaults")
{
    const auto cfg = parse_scenario(kMinimal);
    CHECK(cfg.method == Method::beacon_sync);
    CHECK(cfg.eval_tick == Duration::ms(10));
    CHECK(cfg.reference.gptp.bound == Duration(350));
    CHECK(cfg.reference.gptp.sync_interval == Duration(31'250'000));
    CHECK(cfg.aps.at(0).beacon_interval_tu == 100);
    CHECK(cfg.stations.at(0).clock.drift_range_ppb == 20'000);
}

TEST_CASE("missing reference section is an error")
{
    const auto err = error_of(replace(kMinimal, "\"reference\": {},", ""));
    CHECK(err.find("reference") != std::string::npos);
    CHECK(err.find("missing") != std::string::npos);
}

TEST_CASE("zero duration is an error")
{
    const auto err = error_of(replace(kMinimal, "\"1s\"", "\"0s\""));
    CHECK(err.find("duration must be > 0") != std::string::npos);
}

TEST_CASE("unknown keys are rejected with their path")
{
    const auto err = error_of(replace(kMinimal, "\"reference\": {}", "\"reference\": { \"gptp\": { \"bund\": \"1ns\" } }"));
    CHECK(err.find("reference.gptp.bund") != std::string::npos);
    CHECK(err.find("unknown key") != std::string::npos);
    CHECK(error_of(replace(kMinimal, "\"name\"", "\"nmae\": 1, \"name\"")).find("unknown key") != std::string::npos);
}

TEST_CASE("constraint violations name the key")
{
    CHECK(error_of(replace(kMinimal, "\"reference\": {}", "\"reference\": { \"publisher_id\": 70000 }"))
              .find("publisher_id") != std::string::npos);
    CHECK(error_of(replace(kMinimal, "\"id\": \"sta1\",", "\"id\": \"sta1\", \"beacon_link\": { \"loss_prob\": 2 },"))
              .find("loss_prob") != std::string::npos);
    CHECK(error_of(replace(kMinimal, "\"1s\"", "\"1s\", \"method\": \"magic\"")).find("method") != std::string::npos);
    CHECK(error_of(replace(kMinimal, "\"1s\"", "\"1 fortnight\"")).find("duration") != std::string::npos);
}

TEST_CASE("duplicate station ids are rejected")
{
    const auto text = replace(kMinimal, "\"stations\": [ { \"id\": \"sta1\", \"bssid_filter\": \"02:00:00:00:00:01\" } ]",
                              "\"stations\": [ { \"id\": \"a\", \"bssid_filter\": \"02:00:00:00:00:01\" },"
                              " { \"id\": \"a\", \"bssid_filter\": \"02:00:00:00:00:01\" } ]");
    CHECK(error_of(text).find("duplicate") != std::string::npos);
}

TEST_CASE("comments are allowed")
{
    CHECK_NOTHROW(parse_scenario("// leading comment\n" + kMinimal));
}

TEST_CASE("bundled paper-fig7 runs both methods")
{
    const auto cfg = load_scenario(std::filesystem::path(BEACONSYNC_SOURCE_DIR) / "scenarios" / "paper-fig7.json");
    CHECK(cfg.method == Method::both);
    CHECK(cfg.name == "paper-fig7");
    CHECK(cfg.base_dir.filename() == "scenarios");
}

TEST_CASE("every bundled scenario loads")
{
    int n = 0;
    for (const auto& e : std::filesystem::recursive_directory_iterator(std::filesystem::path(BEACONSYNC_SOURCE_DIR) / "scenarios")) {
        if (e.path().extension() != ".json") continue;
        CAPTURE(e.path().string());
        CHECK_NOTHROW(load_scenario(e.path()));
        ++n;
    }
    CHECK(n >= 5);
}
