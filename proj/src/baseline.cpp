#include "beaconsync/baseline.hpp"

#include "beaconsync/protocol.hpp"

#include <stdexcept>

namespace beaconsync {

void validate(const TwoWayExchange& x)
{
    if (x.t4 < x.t1) throw std::invalid_argument("two-way exchange: t4 precedes t1");
    if (x.t3 < x.t2) throw std::invalid_argument("two-way exchange: t3 precedes t2");
}

std::int64_t ptp_offset_twice(const TwoWayExchange& x)
{
    return ((x.t2 - x.t1) - (x.t4 - x.t3)).count();
}

Duration ptp_offset_estimate(const TwoWayExchange& x)
{
    return Duration(detail::floor_div(ptp_offset_twice(x), 2));
}

std::optional<TwoWayExchange> PartialExchange::complete() const
{
    if (!t1 || !t2 || !t3 || !t4) return std::nullopt;
    return TwoWayExchange{*t1, *t2, *t3, *t4};
}

std::optional<Duration> PtpSlave::on_exchange(const PartialExchange& x)
{
    auto full = x.complete();
    if (!full) {
        ++incomplete_;
        return std::nullopt;
    }
    validate(*full);
    offset_ = ptp_offset_estimate(*full);
    ++completed_;
    return offset_;
}

SimTime PtpSlave::master_time(SimTime slave_reading) const
{
    if (!offset_) throw Unsynchronized();
    return slave_reading - *offset_;
}

} // namespace beaconsync
