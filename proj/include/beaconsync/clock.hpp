#pragma once

#include "beaconsync/rng.hpp"
#include "beaconsync/time.hpp"

#include <cstdint>

namespace beaconsync {

/// Parameters of a free-running local oscillator.
struct ClockModel {
    Duration offset_at_epoch{0};
    std::int64_t drift_ppb = 0;
    Duration granularity{1};
    Duration read_noise_std{0};
    std::uint64_t rng_stream_id = 0;
};

/// Throws std::invalid_argument when granularity <= 0 or noise < 0.
void validate(const ClockModel& model);

/// offset + t * (1 + drift_ppb * 1e-9), floored to a multiple of granularity.
/// Exact integer arithmetic; the noise term is not included.
SimTime ideal_reading(const ClockModel& model, SimTime true_time);

/// A virtual clock: deterministic given the model and the sequence of reads.
class Clock {
public:
    explicit Clock(ClockModel model);

    /// Local reading at `true_time` (>= epoch), including read noise.
    SimTime read(SimTime true_time);

    const ClockModel& model() const { return model_; }

private:
    ClockModel model_;
    Rng noise_;
};

enum class ResidualDistribution { uniform_in_bound, triangular };

/// Bounded, piecewise-constant error of a gPTP-disciplined clock with respect
/// to the grandmaster.
struct GptpResidualModel {
    Duration bound{350};
    Duration sync_interval{31'250'000};
    ResidualDistribution distribution = ResidualDistribution::uniform_in_bound;
    std::uint64_t rng_stream_id = 0;
};

/// Residual applied during the sync window that contains `gm_time`. The same
/// window always yields the same residual regardless of read order.
Duration gptp_residual(const GptpResidualModel& model, SimTime gm_time);

/// gm_time + residual; |residual| <= model.bound.
SimTime reference_clock_read(SimTime gm_time, const GptpResidualModel& model);

/// The reference station's time-aware clock: grandmaster time plus the gPTP
/// residual, latched by a timestamping unit of the given granularity.
class ReferenceClock {
public:
    ReferenceClock(GptpResidualModel residual, Duration granularity);

    SimTime read(SimTime gm_time) const;

    const GptpResidualModel& residual_model() const { return residual_; }
    Duration granularity() const { return granularity_; }

private:
    GptpResidualModel residual_;
    Duration granularity_;
};

} // namespace beaconsync
