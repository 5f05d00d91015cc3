#include "beaconsync/scenario.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace beaconsync {

using nlohmann::json;

std::string to_string(Method m)
{
    switch (m) {
    case Method::beacon_sync:
        return "beacon_sync";
    case Method::ptp_baseline:
        return "ptp_baseline";
    case Method::both:
        return "both";
    }
    return "?";
}

Method parse_method(const std::string& s)
{
    if (s == "beacon_sync") return Method::beacon_sync;
    if (s == "ptp_baseline") return Method::ptp_baseline;
    if (s == "both") return Method::both;
    throw ScenarioError("method must be one of beacon_sync, ptp_baseline, both (got '" + s + "')");
}

namespace {

/// Object reader that records which keys were consumed and rejects the rest.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) fail("", "must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key)
    {
        used_.insert(key);
        if (!j_.contains(key)) fail(key, "missing required key");
        return j_.at(key);
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const
    {
        const std::string where = key.empty() ? (path_.empty() ? std::string("<root>") : path_) : key_path(key);
        throw ScenarioError("'" + where + "': " + why);
    }

    std::string string(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_string()) fail(key, "must be a string");
        return v.get<std::string>();
    }

    std::int64_t integer(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_number_integer()) fail(key, "must be an integer");
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_number_unsigned()) fail(key, "must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    double number(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_number()) fail(key, "must be a number");
        return v.get<double>();
    }

    bool boolean(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_boolean()) fail(key, "must be true or false");
        return v.get<bool>();
    }

    Duration duration(const std::string& key)
    {
        const json& v = raw(key);
        if (v.is_number_integer()) return Duration(v.get<std::int64_t>());
        if (!v.is_string()) fail(key, "must be a duration string such as \"102.4ms\" or integer nanoseconds");
        try {
            return parse_duration(v.get<std::string>());
        } catch (const std::exception& e) {
            fail(key, e.what());
        }
    }

    MacAddress mac(const std::string& key)
    {
        try {
            return MacAddress::parse(string(key));
        } catch (const std::invalid_argument& e) {
            fail(key, e.what());
        }
    }

    Section object(const std::string& key) { return Section(raw(key), key_path(key)); }

    /// Throws on any key that was not read.
    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) fail(it.key(), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void require_positive(Section& s, const std::string& key, Duration d)
{
    if (d <= Duration(0)) s.fail(key, key + " must be > 0");
}

void require_non_negative(Section& s, const std::string& key, Duration d)
{
    if (d < Duration(0)) s.fail(key, key + " must be >= 0");
}

void require_probability(Section& s, const std::string& key, double p)
{
    if (!(p >= 0.0 && p <= 1.0)) s.fail(key, key + " must be in [0, 1]");
}

LinkModel read_link(Section s, LinkModel link)
{
    if (s.has("propagation_delay")) link.propagation_delay = s.duration("propagation_delay");
    require_non_negative(s, "propagation_delay", link.propagation_delay);
    if (s.has("jitter_std")) link.rx_jitter_std = s.duration("jitter_std");
    require_non_negative(s, "jitter_std", link.rx_jitter_std);
    if (s.has("jitter_dist")) {
        const auto d = s.string("jitter_dist");
        if (d == "gaussian_truncated") {
            link.rx_jitter_dist = JitterDistribution::gaussian_truncated;
        } else if (d == "uniform") {
            link.rx_jitter_dist = JitterDistribution::uniform;
        } else {
            s.fail("jitter_dist", "must be gaussian_truncated or uniform");
        }
    }
    if (s.has("loss_prob")) link.loss_prob = s.number("loss_prob");
    require_probability(s, "loss_prob", link.loss_prob);
    if (s.has("contention")) {
        Section c = s.object("contention");
        Contention k;
        k.burst_prob = c.number("burst_prob");
        require_probability(c, "burst_prob", k.burst_prob);
        k.extra_delay_min = c.duration("extra_delay_min");
        k.extra_delay_max = c.duration("extra_delay_max");
        require_non_negative(c, "extra_delay_min", k.extra_delay_min);
        if (k.extra_delay_max < k.extra_delay_min) c.fail("extra_delay_max", "must be >= extra_delay_min");
        c.finish();
        link.contention = k;
    }
    s.finish();
    return link;
}

ClockParams read_clock(Section s, ClockParams clock)
{
    if (s.has("offset")) clock.offset = s.duration("offset");
    if (s.has("drift_ppb") && s.has("drift_range_ppb")) s.fail("drift_ppb", "drift_ppb and drift_range_ppb are exclusive");
    if (s.has("drift_ppb")) {
        clock.drift_ppb = s.integer("drift_ppb");
        clock.drift_range_ppb.reset();
    }
    if (s.has("drift_range_ppb")) {
        clock.drift_range_ppb = s.integer("drift_range_ppb");
        if (*clock.drift_range_ppb < 0) s.fail("drift_range_ppb", "drift_range_ppb must be >= 0");
    }
    if (clock.drift_ppb <= -1'000'000'000 || clock.drift_ppb >= 1'000'000'000)
        s.fail("drift_ppb", "drift_ppb must lie in (-1e9, 1e9)");
    if (clock.drift_range_ppb && *clock.drift_range_ppb >= 1'000'000'000)
        s.fail("drift_range_ppb", "drift_range_ppb must be < 1e9");
    if (s.has("granularity")) clock.granularity = s.duration("granularity");
    require_positive(s, "granularity", clock.granularity);
    if (s.has("read_noise_std")) clock.read_noise_std = s.duration("read_noise_std");
    require_non_negative(s, "read_noise_std", clock.read_noise_std);
    s.finish();
    return clock;
}

LinkModel default_beacon_link()
{
    LinkModel l;
    l.propagation_delay = Duration(100);
    l.rx_jitter_std = Duration::us(2);
    return l;
}

ApParams read_ap(Section s)
{
    ApParams ap;
    ap.bssid = s.mac("bssid");
    if (s.has("beacon_interval_tu")) {
        const auto tu = s.integer("beacon_interval_tu");
        if (tu <= 0 || tu > 0xFFFF) s.fail("beacon_interval_tu", "beacon_interval_tu must be in [1, 65535]");
        ap.beacon_interval_tu = static_cast<std::uint16_t>(tu);
    }
    if (s.has("tsf_origin")) ap.tsf_origin = s.duration("tsf_origin");
    require_non_negative(s, "tsf_origin", ap.tsf_origin);
    if (s.has("tsf_drift_ppb")) ap.tsf_drift_ppb = s.integer("tsf_drift_ppb");
    if (ap.tsf_drift_ppb <= -1'000'000'000 || ap.tsf_drift_ppb >= 1'000'000'000)
        s.fail("tsf_drift_ppb", "tsf_drift_ppb must lie in (-1e9, 1e9)");
    s.finish();
    return ap;
}

StationParams read_station(Section s)
{
    StationParams st;
    st.id = s.string("id");
    if (st.id.empty() || st.id.find_first_of(",\t\n ") != std::string::npos)
        s.fail("id", "id must be non-empty without commas or whitespace");
    ClockParams clock;
    clock.drift_range_ppb = 20'000;
    st.clock = s.has("clock") ? read_clock(s.object("clock"), clock) : clock;
    st.beacon_link = s.has("beacon_link") ? read_link(s.object("beacon_link"), default_beacon_link()) : default_beacon_link();
    if (s.has("pubsub_link")) st.pubsub_link = read_link(s.object("pubsub_link"), LinkModel{});
    st.bssid_filter = s.mac("bssid_filter");
    if (s.has("joined")) st.joined = s.boolean("joined");
    if (s.has("two_point_drift")) st.two_point_drift = s.boolean("two_point_drift");
    s.finish();
    return st;
}

ReferenceParams read_reference(Section s)
{
    ReferenceParams ref;
    ref.beacon_link = default_beacon_link();
    if (s.has("timestamp_granularity")) ref.timestamp_granularity = s.duration("timestamp_granularity");
    require_positive(s, "timestamp_granularity", ref.timestamp_granularity);
    if (s.has("gptp")) {
        Section g = s.object("gptp");
        if (g.has("bound")) ref.gptp.bound = g.duration("bound");
        require_non_negative(g, "bound", ref.gptp.bound);
        if (g.has("sync_interval")) ref.gptp.sync_interval = g.duration("sync_interval");
        require_positive(g, "sync_interval", ref.gptp.sync_interval);
        if (g.has("distribution")) {
            const auto d = g.string("distribution");
            if (d == "uniform_in_bound") {
                ref.gptp.distribution = ResidualDistribution::uniform_in_bound;
            } else if (d == "triangular") {
                ref.gptp.distribution = ResidualDistribution::triangular;
            } else {
                g.fail("distribution", "must be uniform_in_bound or triangular");
            }
        }
        g.finish();
    }
    if (s.has("beacon_link")) ref.beacon_link = read_link(s.object("beacon_link"), ref.beacon_link);
    if (s.has("bssid_filter")) ref.bssid_filter = s.mac("bssid_filter");
    if (s.has("publisher_id")) {
        const auto id = s.integer("publisher_id");
        if (id < 0 || id > 0xFFFF) s.fail("publisher_id", "publisher_id must be in [0, 65535]");
        ref.publisher_id = static_cast<std::uint16_t>(id);
    }
    s.finish();
    return ref;
}

BaselineParams read_baseline(Section s)
{
    BaselineParams b;
    if (s.has("sync_interval")) b.sync_interval = s.duration("sync_interval");
    require_positive(s, "sync_interval", b.sync_interval);
    if (s.has("turnaround")) b.turnaround = s.duration("turnaround");
    require_non_negative(s, "turnaround", b.turnaround);
    if (s.has("timestamp_granularity")) b.timestamp_granularity = s.duration("timestamp_granularity");
    require_positive(s, "timestamp_granularity", b.timestamp_granularity);
    if (s.has("downlink")) b.downlink = read_link(s.object("downlink"), b.downlink);
    if (s.has("uplink")) b.uplink = read_link(s.object("uplink"), b.uplink);
    if (s.has("stack")) b.stack = read_link(s.object("stack"), b.stack);
    s.finish();
    return b;
}

OutputParams read_output(Section s)
{
    OutputParams o;
    auto opt = [&](const char* key, std::optional<std::string>& dst) {
        if (s.has(key)) dst = s.string(key);
    };
    opt("samples_csv", o.samples_csv);
    opt("trace", o.trace);
    opt("report", o.report);
    opt("reference_pcap", o.reference_pcap);
    opt("tuple_log", o.tuple_log);
    if (s.has("station_pcaps")) {
        Section p = s.object("station_pcaps");
        const json& raw = s.raw("station_pcaps");
        for (auto it = raw.begin(); it != raw.end(); ++it) o.station_pcaps[it.key()] = p.string(it.key());
        p.finish();
    }
    s.finish();
    return o;
}

} // namespace

void validate(const ScenarioConfig& cfg)
{
    if (cfg.duration <= Duration(0)) throw ScenarioError("'duration': duration must be > 0");
    if (cfg.eval_tick <= Duration(0)) throw ScenarioError("'eval_tick': eval_tick must be > 0");
    if (cfg.aps.empty()) throw ScenarioError("'aps': at least one AP is required");
    if (cfg.stations.empty()) throw ScenarioError("'stations': at least one station is required");
    std::set<MacAddress> bssids;
    for (const auto& ap : cfg.aps) {
        if (!bssids.insert(ap.bssid).second) throw ScenarioError("'aps': duplicate bssid " + ap.bssid.to_string());
    }
    std::set<std::string> ids;
    for (const auto& st : cfg.stations) {
        if (!ids.insert(st.id).second) throw ScenarioError("'stations': duplicate id '" + st.id + "'");
    }
    for (const auto& [id, path] : cfg.output.station_pcaps) {
        if (!ids.count(id)) throw ScenarioError("'output.station_pcaps." + id + "': no station with that id");
    }
}

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& origin)
{
    json doc;
    try {
        doc = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ScenarioError(origin + ": " + e.what());
    }

    ScenarioConfig cfg;
    Section root(doc, "");
    cfg.name = root.string("name");
    cfg.duration = root.duration("duration");
    require_positive(root, "duration", cfg.duration);
    if (root.has("seed")) cfg.seed = root.unsigned_integer("seed");
    if (root.has("method")) {
        try {
            cfg.method = parse_method(root.string("method"));
        } catch (const ScenarioError& e) {
            root.fail("method", e.what());
        }
    }
    if (root.has("eval_tick")) cfg.eval_tick = root.duration("eval_tick");
    require_positive(root, "eval_tick", cfg.eval_tick);

    const json& aps = root.raw("aps");
    if (!aps.is_array() || aps.empty()) root.fail("aps", "must be a non-empty array");
    for (std::size_t i = 0; i < aps.size(); ++i) cfg.aps.push_back(read_ap(Section(aps[i], "aps[" + std::to_string(i) + "]")));

    cfg.reference = read_reference(root.object("reference"));

    const json& stations = root.raw("stations");
    if (!stations.is_array() || stations.empty()) root.fail("stations", "must be a non-empty array");
    for (std::size_t i = 0; i < stations.size(); ++i)
        cfg.stations.push_back(read_station(Section(stations[i], "stations[" + std::to_string(i) + "]")));

    if (root.has("pubsub_link")) cfg.pubsub_link = read_link(root.object("pubsub_link"), LinkModel{});
    if (root.has("baseline")) cfg.baseline = read_baseline(root.object("baseline"));
    if (root.has("output")) cfg.output = read_output(root.object("output"));
    if (root.has("record_trace")) cfg.record_trace = root.boolean("record_trace");
    root.finish();

    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot read scenario file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    ScenarioConfig cfg = parse_scenario(ss.str(), path.string());
    cfg.base_dir = path.parent_path();
    return cfg;
}

} // namespace beaconsync
