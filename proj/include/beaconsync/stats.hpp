#pragma once

#include "beaconsync/time.hpp"

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace beaconsync {

/// Error of one method's TSN-time estimate at one evaluation tick.
struct OffsetSample {
    SimTime at; // true (grandmaster) time
    std::string method;
    std::string station;
    std::int64_t error_ns = 0; // estimate - true grandmaster time

    friend bool operator==(const OffsetSample&, const OffsetSample&) = default;
};

/// Synchronicity classes of industrial use cases: the largest tolerated
/// clock error for each.
enum class RealTimeClass { I, II, III };

Duration threshold(RealTimeClass c);
std::string class_name(RealTimeClass c);

/// Pure function of max |error|.
bool verdict(RealTimeClass c, std::int64_t max_abs_ns);

/// Median on even counts is the lower median. The signed median and the mean
/// describe bias; the *_abs_ns figures describe magnitude.
struct SummaryStats {
    std::uint64_t count = 0;
    std::int64_t median_ns = 0;
    std::int64_t median_abs_ns = 0;
    double mean_ns = 0.0;
    std::int64_t p95_abs_ns = 0;
    std::int64_t p99_abs_ns = 0;
    std::int64_t max_abs_ns = 0;
    std::map<RealTimeClass, bool> class_verdicts;
};

/// Throws std::invalid_argument on empty input.
SummaryStats summarize(std::span<const std::int64_t> errors_ns);

struct Report {
    std::string scenario;
    std::map<std::string, SummaryStats> by_method;
    std::map<std::pair<std::string, std::string>, SummaryStats> by_method_station;
    std::map<std::string, std::uint64_t> counters;
};

/// Throws std::invalid_argument when `samples` is empty.
Report summarize(const std::string& scenario, const std::vector<OffsetSample>& samples,
                 const std::map<std::string, std::uint64_t>& counters = {});

/// "class II: PASS (<=1 ms)"
std::string verdict_line(RealTimeClass c, bool pass);

constexpr const char* kSamplesCsvHeader = "at_ns,method,station,error_ns";

void write_samples_csv(std::ostream& out, const std::vector<OffsetSample>& samples);
std::vector<OffsetSample> read_samples_csv(std::istream& in);

std::string report_json(const Report& r);
std::string report_csv(const Report& r);
/// Human-readable summary with verdict lines per method.
std::string report_text(const Report& r);

} // namespace beaconsync
