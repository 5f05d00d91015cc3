#pragma once

#include "beaconsync/frames.hpp"
#include "beaconsync/time.hpp"
#include "beaconsync/uadp.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace beaconsync {

/// t_TSN = t_TSN[t_bf] - t_station[t_bf] + t_station[current]
SimTime apply_correction(SimTime t_tsn_at_bf, SimTime t_station_at_bf, SimTime t_station_current);

/// Per-BSSID TSF bookkeeping that separates fresh beacons from duplicates and
/// AP restarts, using the plausibility window of the beacon interval.
class TsfContinuity {
public:
    enum class Verdict { fresh, duplicate, restart };

    explicit TsfContinuity(std::uint16_t beacon_interval_tu = kDefaultBeaconIntervalTu)
        : window_us_(plausibility_window_us(beacon_interval_tu))
    {
    }

    /// Classifies `tsf` and advances the latest value on fresh/restart.
    Verdict observe(const MacAddress& bssid, std::uint64_t tsf);
    std::optional<std::uint64_t> latest(const MacAddress& bssid) const;
    std::uint64_t window_us() const { return window_us_; }

private:
    std::uint64_t window_us_;
    std::map<MacAddress, std::uint64_t> latest_;
};

struct ReferenceCounters {
    std::uint64_t published = 0;
    std::uint64_t filtered = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t restarts = 0;

    friend bool operator==(const ReferenceCounters&, const ReferenceCounters&) = default;
};

/// Reference System: pairs each beacon TSF with the TSN time captured at its
/// arrival and publishes the pair.
class ReferenceStation {
public:
    struct Config {
        std::uint16_t publisher_id = 1;
        std::optional<MacAddress> bssid_filter;
        std::uint16_t beacon_interval_tu = kDefaultBeaconIntervalTu;
        std::size_t history = 32;
    };

    explicit ReferenceStation(Config config);

    bool accepts(const MacAddress& bssid) const;

    /// `tsn_now` must be the reference clock latched at beacon arrival.
    std::optional<NetworkMessage> on_beacon(const BeaconObservation& obs, SimTime tsn_now);

    const WriterDirectory& directory() const { return directory_; }
    const ReferenceCounters& counters() const { return counters_; }
    std::uint32_t publisher_sequence() const { return sequence_; }
    std::uint16_t publisher_id() const { return config_.publisher_id; }
    /// Recently published pairs, bounded by Config::history.
    const std::map<BeaconKey, SimTime>& pending() const { return pending_; }

private:
    Config config_;
    TsfContinuity continuity_;
    WriterDirectory directory_;
    std::map<BeaconKey, SimTime> pending_;
    std::deque<BeaconKey> order_;
    std::uint32_t sequence_ = 0;
    ReferenceCounters counters_;
};

/// Raised when an estimate is requested before the first matched pair.
class Unsynchronized : public std::runtime_error {
public:
    Unsynchronized() : std::runtime_error("unsynchronized: no correction available") {}
};

struct Correction {
    SimTime t_tsn_at_bf;
    SimTime t_station_at_bf;
    std::uint64_t t_bf = 0;
    MacAddress bssid;

    friend bool operator==(const Correction&, const Correction&) = default;
};

struct SyncEstimate {
    SimTime t_tsn_estimate;
    Duration age;
    std::uint64_t source_t_bf = 0;
};

struct StationCounters {
    std::uint64_t matched = 0;
    std::uint64_t missed_tuples = 0;
    std::uint64_t stale_tuples = 0;
    std::uint64_t duplicate_beacons = 0;
    std::uint64_t restarts = 0;
    std::uint64_t evicted = 0;

    friend bool operator==(const StationCounters&, const StationCounters&) = default;
};

/// Complete comparable state of a StationSync, excluding the counters of
/// frames dropped by the BSSID filter.
struct StationSnapshot {
    std::vector<BeaconObservation> observations; // FIFO order
    std::optional<Correction> last_correction;
    std::optional<Correction> previous_correction;
    StationCounters counters;

    friend bool operator==(const StationSnapshot&, const StationSnapshot&) = default;
};

/// A station synchronized by the Reference System.
class StationSync {
public:
    struct Config {
        MacAddress bssid_filter;
        std::size_t capacity = 32;
        std::uint16_t beacon_interval_tu = kDefaultBeaconIntervalTu;
        /// Extension beyond the plain offset correction: extrapolate with the
        /// rate between the two most recent pairs. Off by default.
        bool two_point_drift = false;
    };

    explicit StationSync(Config config);

    bool accepts(const MacAddress& bssid) const { return bssid == config_.bssid_filter; }

    void on_beacon(const BeaconObservation& obs);
    std::optional<Correction> on_tuple(const TimestampTuple& tuple);

    bool synchronized() const { return last_.has_value(); }

    /// Throws Unsynchronized before the first match, std::domain_error when
    /// `t_station_current` precedes the correction's local timestamp.
    SyncEstimate estimate(SimTime t_station_current) const;

    const std::optional<Correction>& last_correction() const { return last_; }
    const StationCounters& counters() const { return counters_; }
    std::uint64_t filtered_beacons() const { return filtered_beacons_; }
    std::uint64_t filtered_tuples() const { return filtered_tuples_; }
    StationSnapshot snapshot() const;

private:
    void flush(const MacAddress& bssid);

    Config config_;
    TsfContinuity continuity_;
    std::map<BeaconKey, SimTime> observations_;
    std::deque<BeaconKey> order_;
    std::optional<Correction> last_;
    std::optional<Correction> previous_;
    StationCounters counters_;
    std::uint64_t filtered_beacons_ = 0;
    std::uint64_t filtered_tuples_ = 0;
};

} // namespace beaconsync
