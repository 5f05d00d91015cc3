#pragma once

#include "beaconsync/frames.hpp"
#include "beaconsync/rng.hpp"
#include "beaconsync/time.hpp"

#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace beaconsync {

/// Min-queue ordered by (due, insertion sequence): events with the same due
/// time fire in the order they were scheduled.
template <typename Event>
class EventQueue {
public:
    struct Entry {
        SimTime due;
        std::uint64_t seq;
        Event event;
    };

    void schedule(SimTime due, Event event)
    {
        heap_.push(Entry{due, next_seq_++, std::move(event)});
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    SimTime next_due() const { return heap_.top().due; }

    Entry pop()
    {
        Entry e = std::move(const_cast<Entry&>(heap_.top()));
        heap_.pop();
        return e;
    }

private:
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const
        {
            if (a.due != b.due) return a.due > b.due;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

enum class JitterDistribution { gaussian_truncated, uniform };

struct Contention {
    double burst_prob = 0.0;
    Duration extra_delay_min{0};
    Duration extra_delay_max{0};
};

/// Per-receiver channel. The jitter term is non-negative with the given
/// standard deviation: a Gaussian truncated at +-5 sigma and shifted by 5
/// sigma, or a uniform over [0, sqrt(12) sigma].
struct LinkModel {
    Duration propagation_delay{0};
    Duration rx_jitter_std{0};
    JitterDistribution rx_jitter_dist = JitterDistribution::gaussian_truncated;
    double loss_prob = 0.0;
    std::optional<Contention> contention;
};

/// Throws std::invalid_argument on negative delays or probabilities outside [0, 1].
void validate(const LinkModel& link);

/// A LinkModel with its own random stream.
class Link {
public:
    Link(LinkModel model, std::uint64_t stream);

    /// Delay for one frame, or nullopt if the frame is lost.
    std::optional<Duration> sample();

    const LinkModel& model() const { return model_; }

private:
    LinkModel model_;
    Rng rng_;
};

struct ApModel {
    MacAddress bssid;
    std::uint16_t beacon_interval_tu = kDefaultBeaconIntervalTu;
    SimTime tsf_origin;
    std::int64_t tsf_drift_ppb = 0;
};

struct BeaconEmission {
    SimTime at; // true transmit time
    std::uint64_t tsf = 0;
    std::uint16_t seq_ctl = 0;
};

/// Beacons at AP-local multiples of the interval, strictly after power-on and
/// before `horizon`. The AP's TSF runs at (1 + drift_ppb * 1e-9) of true time.
std::vector<BeaconEmission> schedule_beacons(const ApModel& ap, SimTime horizon);

/// One arrival (or loss) per receiver, in receiver order.
struct Delivery {
    std::size_t receiver = 0;
    std::optional<SimTime> arrival;
};

/// One transmission, independently delayed or dropped per receiver.
std::vector<Delivery> deliver_broadcast(std::span<Link* const> receivers, SimTime now);

struct Subscriber {
    Link* link = nullptr;
    bool joined = true;
};

/// Multicast delivery; subscribers that have not joined receive nothing and
/// are omitted from the result.
std::vector<Delivery> deliver_multicast(std::span<const Subscriber> subscribers, SimTime now);

/// One line of the event trace.
struct TraceEvent {
    SimTime due;
    std::string type;
    std::string src;
    std::string dst;
    std::string fields; // space separated key=value pairs

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// "<due_ns>\t<type>\t<src>\t<dst>\t<fields>"
std::string format_trace_line(const TraceEvent& e);

} // namespace beaconsync
