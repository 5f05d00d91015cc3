#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace beaconsync {

/// Raised when a time computation leaves the signed 64-bit nanosecond range.
class TimeOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw TimeOverflow("time addition overflows int64 ns");
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw TimeOverflow("time subtraction overflows int64 ns");
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw TimeOverflow("time multiplication overflows int64 ns");
    return r;
}

inline std::int64_t narrow(__int128 v)
{
    if (v > INT64_MAX || v < INT64_MIN) throw TimeOverflow("time value exceeds int64 ns");
    return static_cast<std::int64_t>(v);
}

/// Floor division for a positive divisor.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && (a < 0)) --q;
    return q;
}

} // namespace detail

/// Signed span of time in nanoseconds.
class Duration {
public:
    constexpr Duration() = default;
    constexpr explicit Duration(std::int64_t ns) : ns_(ns) {}

    static constexpr Duration ns(std::int64_t v) { return Duration(v); }
    static Duration us(std::int64_t v) { return Duration(detail::checked_mul(v, 1'000)); }
    static Duration ms(std::int64_t v) { return Duration(detail::checked_mul(v, 1'000'000)); }
    static Duration s(std::int64_t v) { return Duration(detail::checked_mul(v, 1'000'000'000)); }

    constexpr std::int64_t count() const { return ns_; }

    friend constexpr auto operator<=>(Duration, Duration) = default;

    friend Duration operator+(Duration a, Duration b) { return Duration(detail::checked_add(a.ns_, b.ns_)); }
    friend Duration operator-(Duration a, Duration b) { return Duration(detail::checked_sub(a.ns_, b.ns_)); }
    friend Duration operator*(Duration a, std::int64_t k) { return Duration(detail::checked_mul(a.ns_, k)); }
    Duration operator-() const { return Duration(detail::checked_sub(0, ns_)); }
    Duration& operator+=(Duration o) { return *this = *this + o; }
    Duration& operator-=(Duration o) { return *this = *this - o; }

private:
    std::int64_t ns_ = 0;
};

/// Point on the simulation time axis, nanoseconds since the simulation epoch.
class SimTime {
public:
    constexpr SimTime() = default;
    constexpr explicit SimTime(std::int64_t ns) : ns_(ns) {}

    static constexpr SimTime epoch() { return SimTime(0); }

    constexpr std::int64_t nanos() const { return ns_; }
    constexpr Duration since_epoch() const { return Duration(ns_); }

    friend constexpr auto operator<=>(SimTime, SimTime) = default;

    friend SimTime operator+(SimTime t, Duration d) { return SimTime(detail::checked_add(t.ns_, d.count())); }
    friend SimTime operator-(SimTime t, Duration d) { return SimTime(detail::checked_sub(t.ns_, d.count())); }
    friend Duration operator-(SimTime a, SimTime b) { return Duration(detail::checked_sub(a.ns_, b.ns_)); }
    SimTime& operator+=(Duration d) { return *this = *this + d; }

private:
    std::int64_t ns_ = 0;
};

/// Parses "350ns", "31.25 ms", "2us", "10 min" into an exact nanosecond count.
/// Fractional values must resolve to a whole number of nanoseconds.
Duration parse_duration(const std::string& text);

/// Shortest exact rendering, e.g. 31250000 ns -> "31.25ms".
std::string format_duration(Duration d);

} // namespace beaconsync
