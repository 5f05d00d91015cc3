#pragma once

// Two-way (delay request/response) time transfer as PTP runs it over a
// wireless link without hardware timestamps. Used as the comparison method.

#include "beaconsync/time.hpp"

#include <cstdint>
#include <optional>

namespace beaconsync {

/// t1: master send (master clock), t2: slave receive (slave clock),
/// t3: slave send (slave clock), t4: master receive (master clock).
struct TwoWayExchange {
    SimTime t1;
    SimTime t2;
    SimTime t3;
    SimTime t4;
};

/// Throws std::invalid_argument when t4 < t1 or t3 < t2.
void validate(const TwoWayExchange& x);

/// Twice the offset estimate, (t2 - t1) - (t4 - t3). Exact.
std::int64_t ptp_offset_twice(const TwoWayExchange& x);

/// Slave-minus-master offset ((t2 - t1) - (t4 - t3)) / 2, rounded toward
/// negative infinity to whole nanoseconds.
Duration ptp_offset_estimate(const TwoWayExchange& x);

/// Exchange under construction; any timestamp may be missing after a loss.
struct PartialExchange {
    std::optional<SimTime> t1;
    std::optional<SimTime> t2;
    std::optional<SimTime> t3;
    std::optional<SimTime> t4;

    std::optional<TwoWayExchange> complete() const;
};

/// Slave side without a servo: every complete exchange replaces the offset.
class PtpSlave {
public:
    /// Returns the new offset, or nullopt (and counts) for incomplete exchanges.
    std::optional<Duration> on_exchange(const PartialExchange& x);

    bool synchronized() const { return offset_.has_value(); }
    /// Master time implied by a slave clock reading. Throws if unsynchronized.
    SimTime master_time(SimTime slave_reading) const;

    std::uint64_t completed() const { return completed_; }
    std::uint64_t incomplete() const { return incomplete_; }

private:
    std::optional<Duration> offset_;
    std::uint64_t completed_ = 0;
    std::uint64_t incomplete_ = 0;
};

} // namespace beaconsync
