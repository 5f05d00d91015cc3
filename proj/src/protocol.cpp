#include "beaconsync/protocol.hpp"

#include <algorithm>

namespace beaconsync {

SimTime apply_correction(SimTime t_tsn_at_bf, SimTime t_station_at_bf, SimTime t_station_current)
{
    return t_tsn_at_bf + (t_station_current - t_station_at_bf);
}

TsfContinuity::Verdict TsfContinuity::observe(const MacAddress& bssid, std::uint64_t tsf)
{
    auto it = latest_.find(bssid);
    if (it == latest_.end()) {
        latest_.emplace(bssid, tsf);
        return Verdict::fresh;
    }
    const std::uint64_t ahead = tsf_delta(it->second, tsf);
    if (ahead == 0) return Verdict::duplicate;
    if (ahead <= window_us_) {
        it->second = tsf;
        return Verdict::fresh;
    }
    // Slightly behind the latest value: a repeat from the same power cycle.
    if (tsf_delta(tsf, it->second) <= window_us_) return Verdict::duplicate;
    it->second = tsf;
    return Verdict::restart;
}

std::optional<std::uint64_t> TsfContinuity::latest(const MacAddress& bssid) const
{
    auto it = latest_.find(bssid);
    if (it == latest_.end()) return std::nullopt;
    return it->second;
}

ReferenceStation::ReferenceStation(Config config) : config_(config), continuity_(config.beacon_interval_tu)
{
    if (config_.history == 0) throw std::invalid_argument("reference history must be > 0");
}

bool ReferenceStation::accepts(const MacAddress& bssid) const
{
    return !config_.bssid_filter || *config_.bssid_filter == bssid;
}

std::optional<NetworkMessage> ReferenceStation::on_beacon(const BeaconObservation& obs, SimTime tsn_now)
{
    if (!accepts(obs.bssid)) {
        ++counters_.filtered;
        return std::nullopt;
    }
    switch (continuity_.observe(obs.bssid, obs.tsf)) {
    case TsfContinuity::Verdict::duplicate:
        ++counters_.duplicates;
        return std::nullopt;
    case TsfContinuity::Verdict::restart:
        ++counters_.restarts;
        for (auto it = pending_.begin(); it != pending_.end();) {
            it = it->first.bssid == obs.bssid ? pending_.erase(it) : std::next(it);
        }
        std::erase_if(order_, [&](const BeaconKey& k) { return k.bssid == obs.bssid; });
        break;
    case TsfContinuity::Verdict::fresh:
        break;
    }

    const BeaconKey key{obs.bssid, obs.tsf};
    pending_.emplace(key, tsn_now);
    order_.push_back(key);
    while (order_.size() > config_.history) {
        pending_.erase(order_.front());
        order_.pop_front();
    }

    ++sequence_;
    ++counters_.published;
    return make_tuple_message(config_.publisher_id, sequence_, directory_.writer_for(obs.bssid), obs.tsf, tsn_now);
}

StationSync::StationSync(Config config) : config_(config), continuity_(config.beacon_interval_tu)
{
    if (config_.capacity == 0) throw std::invalid_argument("station observation capacity must be > 0");
}

void StationSync::flush(const MacAddress& bssid)
{
    for (auto it = observations_.begin(); it != observations_.end();) {
        it = it->first.bssid == bssid ? observations_.erase(it) : std::next(it);
    }
    std::erase_if(order_, [&](const BeaconKey& k) { return k.bssid == bssid; });
}

void StationSync::on_beacon(const BeaconObservation& obs)
{
    if (!accepts(obs.bssid)) {
        ++filtered_beacons_;
        return;
    }
    switch (continuity_.observe(obs.bssid, obs.tsf)) {
    case TsfContinuity::Verdict::duplicate:
        ++counters_.duplicate_beacons;
        return;
    case TsfContinuity::Verdict::restart:
        ++counters_.restarts;
        flush(obs.bssid);
        break;
    case TsfContinuity::Verdict::fresh:
        break;
    }
    const BeaconKey key{obs.bssid, obs.tsf};
    observations_.emplace(key, obs.local_rx_time);
    order_.push_back(key);
    while (order_.size() > config_.capacity) {
        observations_.erase(order_.front());
        order_.pop_front();
        ++counters_.evicted;
    }
}

std::optional<Correction> StationSync::on_tuple(const TimestampTuple& tuple)
{
    if (!accepts(tuple.bssid)) {
        ++filtered_tuples_;
        return std::nullopt;
    }
    const auto latest = continuity_.latest(tuple.bssid);
    if (!latest) {
        ++counters_.missed_tuples;
        return std::nullopt;
    }
    const std::uint64_t window = continuity_.window_us();
    if (tsf_delta(tuple.t_bf, *latest) > window) {
        if (tsf_delta(*latest, tuple.t_bf) <= window) {
            // Beacon not (yet) received here.
            ++counters_.missed_tuples;
        } else {
            ++counters_.stale_tuples;
        }
        return std::nullopt;
    }
    auto it = observations_.find(BeaconKey{tuple.bssid, tuple.t_bf});
    if (it == observations_.end()) {
        ++counters_.missed_tuples;
        return std::nullopt;
    }
    Correction c{tuple.t_tsn_at_bf, it->second, tuple.t_bf, tuple.bssid};
    if (last_ && last_->t_station_at_bf != c.t_station_at_bf) previous_ = last_;
    last_ = c;
    ++counters_.matched;
    return c;
}

SyncEstimate StationSync::estimate(SimTime t_station_current) const
{
    if (!last_) throw Unsynchronized();
    const Duration age = t_station_current - last_->t_station_at_bf;
    if (age < Duration(0)) throw std::domain_error("estimate requested before the correction's local timestamp");

    SimTime est = apply_correction(last_->t_tsn_at_bf, last_->t_station_at_bf, t_station_current);
    if (config_.two_point_drift && previous_ && last_->t_station_at_bf > previous_->t_station_at_bf) {
        const __int128 d_tsn = (last_->t_tsn_at_bf - previous_->t_tsn_at_bf).count();
        const __int128 d_sta = (last_->t_station_at_bf - previous_->t_station_at_bf).count();
        const __int128 scaled = static_cast<__int128>(age.count()) * d_tsn;
        __int128 q = scaled / d_sta;
        if (scaled % d_sta != 0 && scaled < 0) --q;
        est = last_->t_tsn_at_bf + Duration(detail::narrow(q));
    }
    return SyncEstimate{est, age, last_->t_bf};
}

StationSnapshot StationSync::snapshot() const
{
    StationSnapshot s;
    for (const auto& key : order_) s.observations.push_back({key.bssid, key.tsf, observations_.at(key)});
    s.last_correction = last_;
    s.previous_correction = previous_;
    s.counters = counters_;
    return s;
}

} // namespace beaconsync
