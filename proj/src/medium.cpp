#include "beaconsync/medium.hpp"

#include <cmath>
#include <stdexcept>

namespace beaconsync {

void validate(const LinkModel& link)
{
    if (link.propagation_delay < Duration(0)) throw std::invalid_argument("propagation_delay must be >= 0");
    if (link.rx_jitter_std < Duration(0)) throw std::invalid_argument("jitter_std must be >= 0");
    if (!(link.loss_prob >= 0.0 && link.loss_prob <= 1.0)) throw std::invalid_argument("loss_prob must be in [0, 1]");
    if (link.contention) {
        const auto& c = *link.contention;
        if (!(c.burst_prob >= 0.0 && c.burst_prob <= 1.0)) throw std::invalid_argument("burst_prob must be in [0, 1]");
        if (c.extra_delay_min < Duration(0) || c.extra_delay_max < c.extra_delay_min)
            throw std::invalid_argument("contention extra delay range must satisfy 0 <= min <= max");
    }
}

Link::Link(LinkModel model, std::uint64_t stream) : model_(model), rng_(stream)
{
    validate(model_);
}

std::optional<Duration> Link::sample()
{
    // Every draw is taken unconditionally so the stream position does not
    // depend on earlier outcomes.
    const double loss_draw = rng_.uniform01();
    const double sigma = static_cast<double>(model_.rx_jitter_std.count());
    double jitter = 0.0;
    switch (model_.rx_jitter_dist) {
    case JitterDistribution::gaussian_truncated: {
        double z;
        do {
            z = rng_.normal();
        } while (std::abs(z) > 5.0);
        jitter = (z + 5.0) * sigma;
        break;
    }
    case JitterDistribution::uniform:
        jitter = rng_.uniform01() * std::sqrt(12.0) * sigma;
        break;
    }
    const double burst_draw = rng_.uniform01();
    const double extra_draw = rng_.uniform01();

    if (loss_draw < model_.loss_prob) return std::nullopt;

    Duration delay = model_.propagation_delay + Duration(static_cast<std::int64_t>(std::llround(jitter)));
    if (model_.contention && burst_draw < model_.contention->burst_prob) {
        const auto lo = model_.contention->extra_delay_min.count();
        const auto hi = model_.contention->extra_delay_max.count();
        delay += Duration(lo + static_cast<std::int64_t>(std::llround(extra_draw * static_cast<double>(hi - lo))));
    }
    return delay;
}

std::vector<BeaconEmission> schedule_beacons(const ApModel& ap, SimTime horizon)
{
    if (ap.beacon_interval_tu == 0) throw std::invalid_argument("beacon interval must be > 0 TU");
    if (ap.tsf_drift_ppb <= -1'000'000'000) throw std::invalid_argument("AP drift must be > -1e9 ppb");
    std::vector<BeaconEmission> out;
    const std::uint64_t step_us = beacon_interval_us(ap.beacon_interval_tu);
    const __int128 rate_den = 1'000'000'000 + static_cast<__int128>(ap.tsf_drift_ppb);
    for (std::uint64_t k = 1;; ++k) {
        const std::uint64_t tsf = k * step_us;
        // Earliest true instant at which the AP's TSF reaches `tsf`.
        const __int128 local_ns = static_cast<__int128>(tsf) * 1000;
        const __int128 num = local_ns * 1'000'000'000;
        const __int128 elapsed = (num + rate_den - 1) / rate_den;
        const SimTime at = ap.tsf_origin + Duration(detail::narrow(elapsed));
        if (at >= horizon) break;
        out.push_back(BeaconEmission{at, tsf, static_cast<std::uint16_t>((k & 0x0FFF) << 4)});
    }
    return out;
}

std::vector<Delivery> deliver_broadcast(std::span<Link* const> receivers, SimTime now)
{
    std::vector<Delivery> out;
    out.reserve(receivers.size());
    for (std::size_t i = 0; i < receivers.size(); ++i) {
        auto delay = receivers[i]->sample();
        out.push_back(Delivery{i, delay ? std::optional<SimTime>(now + *delay) : std::nullopt});
    }
    return out;
}

std::vector<Delivery> deliver_multicast(std::span<const Subscriber> subscribers, SimTime now)
{
    std::vector<Delivery> out;
    for (std::size_t i = 0; i < subscribers.size(); ++i) {
        if (!subscribers[i].joined) continue;
        auto delay = subscribers[i].link->sample();
        out.push_back(Delivery{i, delay ? std::optional<SimTime>(now + *delay) : std::nullopt});
    }
    return out;
}

std::string format_trace_line(const TraceEvent& e)
{
    std::string line = std::to_string(e.due.nanos());
    line += '\t';
    line += e.type;
    line += '\t';
    line += e.src;
    line += '\t';
    line += e.dst;
    line += '\t';
    line += e.fields;
    return line;
}

} // namespace beaconsync
