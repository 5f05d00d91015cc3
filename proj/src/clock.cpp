#include "beaconsync/clock.hpp"

#include <cmath>
#include <stdexcept>

namespace beaconsync {

namespace {

std::int64_t floor_to(std::int64_t v, std::int64_t quantum)
{
    return detail::floor_div(v, quantum) * quantum;
}

} // namespace

void validate(const ClockModel& model)
{
    if (model.granularity.count() <= 0) throw std::invalid_argument("clock granularity must be > 0");
    if (model.read_noise_std.count() < 0) throw std::invalid_argument("clock read noise std must be >= 0");
    if (model.drift_ppb <= -1'000'000'000) throw std::invalid_argument("clock drift must be > -1e9 ppb");
}

SimTime ideal_reading(const ClockModel& model, SimTime true_time)
{
    if (true_time < SimTime::epoch()) throw std::invalid_argument("clock read before simulation epoch");
    const __int128 t = true_time.nanos();
    // floor(t * drift / 1e9) keeps the reading monotone in t.
    __int128 skew = t * model.drift_ppb;
    __int128 q = skew / 1'000'000'000;
    if (skew % 1'000'000'000 != 0 && skew < 0) --q;
    std::int64_t raw = detail::narrow(static_cast<__int128>(model.offset_at_epoch.count()) + t + q);
    return SimTime(floor_to(raw, model.granularity.count()));
}

Clock::Clock(ClockModel model) : model_(model), noise_(model.rng_stream_id)
{
    validate(model_);
}

SimTime Clock::read(SimTime true_time)
{
    SimTime reading = ideal_reading(model_, true_time);
    if (model_.read_noise_std.count() == 0) return reading;
    double n = noise_.normal() * static_cast<double>(model_.read_noise_std.count());
    return reading + Duration(static_cast<std::int64_t>(std::llround(n)));
}

Duration gptp_residual(const GptpResidualModel& model, SimTime gm_time)
{
    const std::int64_t bound = model.bound.count();
    if (bound <= 0) return Duration(0);
    if (model.sync_interval.count() <= 0) throw std::invalid_argument("gPTP sync interval must be > 0");

    std::int64_t window = detail::floor_div(gm_time.nanos(), model.sync_interval.count());
    // Counter-based draw keyed by the window index.
    std::uint64_t key = stream_id({model.rng_stream_id, static_cast<std::uint64_t>(window)});
    auto draw01 = [&key]() {
        key = mix64(key);
        return static_cast<double>(key >> 11) * 0x1.0p-53;
    };
    std::int64_t r = 0;
    switch (model.distribution) {
    case ResidualDistribution::uniform_in_bound: {
        const auto span = static_cast<std::uint64_t>(2 * bound + 1);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        do {
            key = mix64(key);
        } while (key >= limit);
        r = static_cast<std::int64_t>(key % span) - bound;
        break;
    }
    case ResidualDistribution::triangular: {
        double u = draw01() + draw01() - 1.0;
        r = static_cast<std::int64_t>(std::llround(u * static_cast<double>(bound)));
        break;
    }
    }
    if (r > bound) r = bound;
    if (r < -bound) r = -bound;
    return Duration(r);
}

SimTime reference_clock_read(SimTime gm_time, const GptpResidualModel& model)
{
    return gm_time + gptp_residual(model, gm_time);
}

ReferenceClock::ReferenceClock(GptpResidualModel residual, Duration granularity)
    : residual_(residual), granularity_(granularity)
{
    if (granularity_.count() <= 0) throw std::invalid_argument("reference granularity must be > 0");
    if (residual_.bound.count() < 0) throw std::invalid_argument("gPTP residual bound must be >= 0");
    if (residual_.sync_interval.count() <= 0) throw std::invalid_argument("gPTP sync interval must be > 0");
}

SimTime ReferenceClock::read(SimTime gm_time) const
{
    SimTime t = reference_clock_read(gm_time, residual_);
    return SimTime(floor_to(t.nanos(), granularity_.count()));
}

} // namespace beaconsync
