#pragma once

#include "beaconsync/clock.hpp"
#include "beaconsync/frames.hpp"
#include "beaconsync/medium.hpp"
#include "beaconsync/time.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace beaconsync {

/// Schema violation in a scenario file; the message names the key path.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Method { beacon_sync, ptp_baseline, both };

std::string to_string(Method m);
Method parse_method(const std::string& s);

/// Local oscillator parameters. Drift is either fixed or drawn once per run
/// uniformly from [-drift_range_ppb, +drift_range_ppb].
struct ClockParams {
    Duration offset{0};
    std::int64_t drift_ppb = 0;
    std::optional<std::int64_t> drift_range_ppb;
    Duration granularity{1000};
    Duration read_noise_std{0};
};

struct ApParams {
    MacAddress bssid;
    std::uint16_t beacon_interval_tu = kDefaultBeaconIntervalTu;
    Duration tsf_origin{0};
    std::int64_t tsf_drift_ppb = 0;
};

struct StationParams {
    std::string id;
    ClockParams clock;
    LinkModel beacon_link;
    std::optional<LinkModel> pubsub_link; // falls back to ScenarioConfig::pubsub_link
    MacAddress bssid_filter;
    bool joined = true;
    bool two_point_drift = false;
};

struct ReferenceParams {
    Duration timestamp_granularity{1000};
    GptpResidualModel gptp;
    LinkModel beacon_link;
    std::optional<MacAddress> bssid_filter;
    std::uint16_t publisher_id = 1;
};

/// Two-way exchange over the same medium with software timestamping.
struct BaselineParams {
    Duration sync_interval = Duration::s(1);
    Duration turnaround = Duration::ms(1);
    Duration timestamp_granularity{1000};
    LinkModel downlink;
    LinkModel uplink;
    /// Host stack latency applied independently at each of the four
    /// timestamping points.
    LinkModel stack;
};

struct OutputParams {
    std::optional<std::string> samples_csv;
    std::optional<std::string> trace;
    std::optional<std::string> report;
    std::optional<std::string> reference_pcap;
    std::map<std::string, std::string> station_pcaps;
    std::optional<std::string> tuple_log;
};

struct ScenarioConfig {
    std::string name;
    Duration duration;
    std::uint64_t seed = 0;
    Method method = Method::beacon_sync;
    Duration eval_tick = Duration::ms(10);
    std::vector<ApParams> aps;
    ReferenceParams reference;
    std::vector<StationParams> stations;
    LinkModel pubsub_link;
    BaselineParams baseline;
    OutputParams output;
    bool record_trace = true;
    /// Directory the scenario was loaded from; relative output paths resolve against it.
    std::filesystem::path base_dir;
};

/// Validates cross-field constraints. Throws ScenarioError.
void validate(const ScenarioConfig& cfg);

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& origin = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

} // namespace beaconsync
