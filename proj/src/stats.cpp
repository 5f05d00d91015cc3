#include "beaconsync/stats.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace beaconsync {

Duration threshold(RealTimeClass c)
{
    switch (c) {
    case RealTimeClass::I:
        return Duration::s(1);
    case RealTimeClass::II:
        return Duration::ms(1);
    case RealTimeClass::III:
        return Duration::us(1);
    }
    throw std::logic_error("unknown real-time class");
}

std::string class_name(RealTimeClass c)
{
    switch (c) {
    case RealTimeClass::I:
        return "class I";
    case RealTimeClass::II:
        return "class II";
    case RealTimeClass::III:
        return "class III";
    }
    return "?";
}

bool verdict(RealTimeClass c, std::int64_t max_abs_ns)
{
    return max_abs_ns <= threshold(c).count();
}

std::string verdict_line(RealTimeClass c, bool pass)
{
    static const std::map<RealTimeClass, const char*> limits{
        {RealTimeClass::I, "<=1 s"}, {RealTimeClass::II, "<=1 ms"}, {RealTimeClass::III, "<=1 us"}};
    return class_name(c) + ": " + (pass ? "PASS" : "FAIL") + " (" + limits.at(c) + ")";
}

namespace {

std::int64_t abs_ns(std::int64_t v)
{
    return v == INT64_MIN ? INT64_MAX : (v < 0 ? -v : v);
}

/// Nearest-rank percentile of sorted data: element ceil(p * n) - 1.
std::int64_t nearest_rank(const std::vector<std::int64_t>& sorted, int percent)
{
    const std::size_t n = sorted.size();
    std::size_t rank = (static_cast<std::size_t>(percent) * n + 99) / 100;
    if (rank == 0) rank = 1;
    return sorted[rank - 1];
}

} // namespace

SummaryStats summarize(std::span<const std::int64_t> errors_ns)
{
    if (errors_ns.empty()) throw std::invalid_argument("cannot summarize an empty sample set");
    SummaryStats s;
    s.count = errors_ns.size();

    std::vector<std::int64_t> signed_sorted(errors_ns.begin(), errors_ns.end());
    std::sort(signed_sorted.begin(), signed_sorted.end());
    std::vector<std::int64_t> mags;
    mags.reserve(errors_ns.size());
    long double sum = 0;
    for (auto e : errors_ns) {
        mags.push_back(abs_ns(e));
        sum += e;
    }
    std::sort(mags.begin(), mags.end());

    const std::size_t lower_mid = (s.count - 1) / 2;
    s.median_ns = signed_sorted[lower_mid];
    s.median_abs_ns = mags[lower_mid];
    s.mean_ns = static_cast<double>(sum / static_cast<long double>(s.count));
    s.p95_abs_ns = nearest_rank(mags, 95);
    s.p99_abs_ns = nearest_rank(mags, 99);
    s.max_abs_ns = mags.back();
    for (auto c : {RealTimeClass::I, RealTimeClass::II, RealTimeClass::III}) s.class_verdicts[c] = verdict(c, s.max_abs_ns);
    return s;
}

Report summarize(const std::string& scenario, const std::vector<OffsetSample>& samples,
                 const std::map<std::string, std::uint64_t>& counters)
{
    if (samples.empty()) throw std::invalid_argument("cannot summarize an empty sample set");
    std::map<std::string, std::vector<std::int64_t>> by_method;
    std::map<std::pair<std::string, std::string>, std::vector<std::int64_t>> by_pair;
    for (const auto& s : samples) {
        by_method[s.method].push_back(s.error_ns);
        by_pair[{s.method, s.station}].push_back(s.error_ns);
    }
    Report r;
    r.scenario = scenario;
    r.counters = counters;
    for (const auto& [m, v] : by_method) r.by_method[m] = summarize(v);
    for (const auto& [k, v] : by_pair) r.by_method_station[k] = summarize(v);
    return r;
}

void write_samples_csv(std::ostream& out, const std::vector<OffsetSample>& samples)
{
    out << kSamplesCsvHeader << '\n';
    for (const auto& s : samples) out << s.at.nanos() << ',' << s.method << ',' << s.station << ',' << s.error_ns << '\n';
}

std::vector<OffsetSample> read_samples_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kSamplesCsvHeader)
        throw std::invalid_argument(std::string("samples CSV must start with '") + kSamplesCsvHeader + "'");
    std::vector<OffsetSample> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string at, method, station, err;
        if (!std::getline(ss, at, ',') || !std::getline(ss, method, ',') || !std::getline(ss, station, ',') ||
            !std::getline(ss, err))
            throw std::invalid_argument("malformed samples CSV line: " + line);
        out.push_back(OffsetSample{SimTime(std::stoll(at)), method, station, std::stoll(err)});
    }
    return out;
}

namespace {

nlohmann::ordered_json stats_json(const SummaryStats& s)
{
    nlohmann::ordered_json j;
    j["count"] = s.count;
    j["median_ns"] = s.median_ns;
    j["median_abs_ns"] = s.median_abs_ns;
    j["mean_ns"] = s.mean_ns;
    j["p95_abs_ns"] = s.p95_abs_ns;
    j["p99_abs_ns"] = s.p99_abs_ns;
    j["max_abs_ns"] = s.max_abs_ns;
    nlohmann::ordered_json v;
    for (const auto& [c, pass] : s.class_verdicts) v[class_name(c)] = pass ? "PASS" : "FAIL";
    j["verdicts"] = v;
    return j;
}

} // namespace

std::string report_json(const Report& r)
{
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    nlohmann::ordered_json methods = nlohmann::ordered_json::object();
    for (const auto& [m, s] : r.by_method) {
        auto mj = stats_json(s);
        nlohmann::ordered_json stations = nlohmann::ordered_json::object();
        for (const auto& [k, ss] : r.by_method_station) {
            if (k.first == m) stations[k.second] = stats_json(ss);
        }
        mj["stations"] = stations;
        methods[m] = mj;
    }
    j["methods"] = methods;
    nlohmann::ordered_json counters = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.counters) counters[k] = v;
    j["counters"] = counters;
    return j.dump(2) + "\n";
}

std::string report_csv(const Report& r)
{
    std::ostringstream out;
    out << "method,station,count,median_ns,median_abs_ns,mean_ns,p95_abs_ns,p99_abs_ns,max_abs_ns,class_I,class_II,"
           "class_III\n";
    auto row = [&](const std::string& m, const std::string& st, const SummaryStats& s) {
        out << m << ',' << st << ',' << s.count << ',' << s.median_ns << ',' << s.median_abs_ns << ','
            << std::llround(s.mean_ns) << ',' << s.p95_abs_ns << ',' << s.p99_abs_ns << ',' << s.max_abs_ns;
        for (const auto& [c, pass] : s.class_verdicts) out << ',' << (pass ? "PASS" : "FAIL");
        out << '\n';
    };
    for (const auto& [m, s] : r.by_method) row(m, "*", s);
    for (const auto& [k, s] : r.by_method_station) row(k.first, k.second, s);
    return out.str();
}

std::string report_text(const Report& r)
{
    std::ostringstream out;
    out << "scenario: " << r.scenario << '\n';
    for (const auto& [m, s] : r.by_method) {
        out << m << ": n=" << s.count << " median|e|=" << format_duration(Duration(s.median_abs_ns))
            << " p99|e|=" << format_duration(Duration(s.p99_abs_ns))
            << " max|e|=" << format_duration(Duration(s.max_abs_ns)) << '\n';
        for (auto c : {RealTimeClass::II, RealTimeClass::III}) out << "  " << verdict_line(c, s.class_verdicts.at(c)) << '\n';
    }
    return out.str();
}

} // namespace beaconsync
