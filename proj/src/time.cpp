#include "beaconsync/time.hpp"

#include <array>
#include <cctype>
#include <string_view>
#include <utility>

namespace beaconsync {

namespace {

struct Unit {
    std::string_view suffix;
    std::int64_t ns;
};

constexpr std::array<Unit, 6> kUnits{{
    {"min", 60'000'000'000},
    {"ms", 1'000'000},
    {"us", 1'000},
    {"\xC2\xB5s", 1'000},
    {"ns", 1},
    {"s", 1'000'000'000},
}};

} // namespace

Duration parse_duration(const std::string& text)
{
    std::string_view s = text;
    auto fail = [&](const char* why) {
        return std::invalid_argument("invalid duration '" + text + "': " + why);
    };
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);

    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }

    __int128 mantissa = 0;
    int frac_digits = 0;
    bool seen_digit = false;
    bool seen_point = false;
    std::size_t i = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            if (mantissa > (static_cast<__int128>(1) << 100)) throw fail("too many digits");
            if (seen_point) ++frac_digits;
            seen_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw fail("missing number");

    std::string_view unit = s.substr(i);
    while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.front()))) unit.remove_prefix(1);
    if (unit.empty()) throw fail("missing unit (ns, us, ms, s, min)");

    std::int64_t scale = 0;
    for (const auto& u : kUnits) {
        if (unit == u.suffix) {
            scale = u.ns;
            break;
        }
    }
    if (scale == 0) throw fail("unknown unit");

    __int128 num = mantissa * scale;
    __int128 den = 1;
    for (int k = 0; k < frac_digits; ++k) den *= 10;
    if (num % den != 0) throw fail("not a whole number of nanoseconds");
    __int128 v = num / den;
    if (negative) v = -v;
    return Duration(detail::narrow(v));
}

std::string format_duration(Duration d)
{
    std::int64_t v = d.count();
    if (v == 0) return "0ns";
    std::string sign = v < 0 ? "-" : "";
    unsigned long long mag = v < 0 ? 0ULL - static_cast<unsigned long long>(v) : static_cast<unsigned long long>(v);

    constexpr std::array<std::pair<unsigned long long, const char*>, 4> scales{{
        {1'000'000'000ULL, "s"}, {1'000'000ULL, "ms"}, {1'000ULL, "us"}, {1ULL, "ns"}}};
    for (const auto& [scale, name] : scales) {
        if (mag < scale && scale != 1) continue;
        unsigned long long whole = mag / scale;
        unsigned long long frac = mag % scale;
        std::string out = sign + std::to_string(whole);
        if (frac != 0) {
            std::string digits = std::to_string(frac);
            std::string pad(std::to_string(scale).size() - 1 - digits.size(), '0');
            digits = pad + digits;
            while (!digits.empty() && digits.back() == '0') digits.pop_back();
            out += "." + digits;
        }
        return out + name;
    }
    return sign + std::to_string(mag) + "ns";
}

} // namespace beaconsync
