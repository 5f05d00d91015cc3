// Command-line front end: run, sweep, ingest, trace-diff.

#include "beaconsync/simulation.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

using namespace beaconsync;
namespace fs = std::filesystem;

namespace {

constexpr const char* kCaptureCaveat =
    "note: capture timestamps are taken by the capture stack at a layer the capture format does not specify";

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "json";
};

/// Fills in default output names so every run leaves samples, a report and
/// (when recorded) a trace behind.
void default_outputs(ScenarioConfig& cfg, const std::string& format)
{
    auto& o = cfg.output;
    if (!o.samples_csv) o.samples_csv = cfg.name + ".samples.csv";
    if (!o.report) o.report = cfg.name + ".report." + format;
    if (!o.trace && cfg.record_trace) o.trace = cfg.name + ".trace.tsv";
}

struct RunSummary {
    std::string name;
    std::optional<Report> report;
    std::string error;
};

RunSummary run_one(const fs::path& scenario, const RunOptions& opt, const fs::path& out_dir)
{
    RunSummary s;
    s.name = scenario.stem().string();
    try {
        ScenarioConfig cfg = load_scenario(scenario);
        s.name = cfg.name;
        if (opt.seed) cfg.seed = *opt.seed;
        default_outputs(cfg, opt.format);
        const RunResult result = run_scenario(cfg);
        fs::create_directories(out_dir);
        write_outputs(cfg, result, out_dir, opt.format);
        if (!result.samples.empty()) s.report = summarize(cfg.name, result.samples, result.counters);
    } catch (const std::exception& e) {
        s.error = e.what();
    }
    return s;
}

int cmd_run(const std::string& scenario, const RunOptions& opt)
{
    const fs::path out = opt.out.empty() ? fs::path("out") / fs::path(scenario).stem() : fs::path(opt.out);
    const RunSummary s = run_one(scenario, opt, out);
    if (!s.error.empty()) {
        std::cerr << "error: " << s.error << '\n';
        return 1;
    }
    if (s.report) {
        std::cout << report_text(*s.report);
    } else {
        std::cout << "scenario: " << s.name << "\nno samples (no station ever synchronized)\n";
    }
    std::cout << "outputs: " << out.string() << '\n';
    return 0;
}

int cmd_sweep(const std::string& dir, const RunOptions& opt)
{
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "error: no .json scenarios in " << dir << '\n';
        return 1;
    }
    const fs::path out = opt.out.empty() ? fs::path("out") / fs::path(dir).filename() : fs::path(opt.out);

    // Independent runs with their own RNG streams; each writes its own directory.
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<RunSummary> results(files.size());
    for (std::size_t begin = 0; begin < files.size(); begin += workers) {
        std::vector<std::future<RunSummary>> batch;
        for (std::size_t i = begin; i < std::min(files.size(), begin + workers); ++i) {
            batch.push_back(std::async(std::launch::async, run_one, files[i], opt, out / files[i].stem()));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) results[begin + i] = batch[i].get();
    }

    int failures = 0;
    std::cout << "scenario,method,count,median_abs_ns,p99_abs_ns,max_abs_ns,class_II,class_III\n";
    for (const auto& r : results) {
        if (!r.error.empty()) {
            std::cerr << r.name << ": error: " << r.error << '\n';
            ++failures;
            continue;
        }
        if (!r.report) {
            std::cout << r.name << ",,0,,,,,\n";
            continue;
        }
        for (const auto& [method, s] : r.report->by_method) {
            std::cout << r.name << ',' << method << ',' << s.count << ',' << s.median_abs_ns << ',' << s.p99_abs_ns << ','
                      << s.max_abs_ns << ',' << (s.class_verdicts.at(RealTimeClass::II) ? "PASS" : "FAIL") << ','
                      << (s.class_verdicts.at(RealTimeClass::III) ? "PASS" : "FAIL") << '\n';
        }
    }
    return failures == 0 ? 0 : 1;
}

int cmd_ingest(const std::string& ref_path, const std::string& sta_path, const std::string& bssid_text,
               const std::string& csv_path)
{
    std::optional<MacAddress> filter;
    if (!bssid_text.empty()) filter = MacAddress::parse(bssid_text);

    const auto ref = extract_beacons(read_pcap(ref_path), filter);
    const auto sta = extract_beacons(read_pcap(sta_path), filter);
    const auto aligned = align_captures(ref.observations, sta.observations, filter);

    std::cout << "bssid: " << aligned.bssid.to_string() << '\n';
    std::cout << "reference beacons: " << ref.observations.size() << " (non-beacon " << ref.counters.non_beacon
              << ", malformed " << ref.counters.malformed << ", filtered " << ref.counters.filtered << ")\n";
    std::cout << "station beacons: " << sta.observations.size() << " (non-beacon " << sta.counters.non_beacon
              << ", malformed " << sta.counters.malformed << ", filtered " << sta.counters.filtered << ")\n";
    std::cout << "matched: " << aligned.station_counters.matched << ", missed: " << aligned.station_counters.missed_tuples
              << ", stale: " << aligned.station_counters.stale_tuples << '\n';

    std::vector<std::int64_t> errors;
    for (const auto& b : aligned.beacons) {
        if (b.prediction_error_ns) errors.push_back(*b.prediction_error_ns);
    }
    if (!errors.empty()) {
        const auto s = summarize(errors);
        std::cout << "prediction error: n=" << s.count << " median|e|=" << format_duration(Duration(s.median_abs_ns))
                  << " p99|e|=" << format_duration(Duration(s.p99_abs_ns))
                  << " max|e|=" << format_duration(Duration(s.max_abs_ns)) << '\n';
        for (auto c : {RealTimeClass::II, RealTimeClass::III})
            std::cout << "  " << verdict_line(c, s.class_verdicts.at(c)) << '\n';
    }
    std::cout << kCaptureCaveat << '\n';

    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot write " + csv_path);
        out << "bssid,tsf,reference_ns,station_ns,prediction_error_ns\n";
        for (const auto& b : aligned.beacons) {
            out << b.bssid.to_string() << ',' << b.tsf << ',' << b.reference_time.nanos() << ',' << b.station_time.nanos()
                << ',';
            if (b.prediction_error_ns) out << *b.prediction_error_ns;
            out << '\n';
        }
    }
    return 0;
}

int cmd_trace_diff(const std::string& a, const std::string& b)
{
    std::ifstream fa(a), fb(b);
    if (!fa) throw std::runtime_error("cannot read " + a);
    if (!fb) throw std::runtime_error("cannot read " + b);
    std::string la, lb;
    std::size_t line = 0;
    while (true) {
        const bool ga = static_cast<bool>(std::getline(fa, la));
        const bool gb = static_cast<bool>(std::getline(fb, lb));
        ++line;
        if (!ga && !gb) break;
        if (ga != gb || la != lb) {
            std::cout << "traces differ at line " << line << '\n';
            std::cout << "< " << (ga ? la : "<end of file>") << '\n';
            std::cout << "> " << (gb ? lb : "<end of file>") << '\n';
            return 1;
        }
    }
    std::cout << "traces identical (" << (line - 1) << " lines)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Beacon-based TSN time distribution over WLAN: simulator and capture analysis"};
    app.require_subcommand(1);

    RunOptions run_opt;
    std::string scenario;
    auto* run = app.add_subcommand("run", "Run one scenario file");
    run->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", run_opt.seed, "Override the scenario seed");
    run->add_option("--out", run_opt.out, "Output directory (default out/<scenario>)");
    run->add_option("--format", run_opt.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    RunOptions sweep_opt;
    std::string sweep_dir;
    auto* sweep = app.add_subcommand("sweep", "Run every scenario file in a directory");
    sweep->add_option("dir", sweep_dir, "Directory of scenario files")->required()->check(CLI::ExistingDirectory);
    sweep->add_option("--seed", sweep_opt.seed, "Override every scenario seed");
    sweep->add_option("--out", sweep_opt.out, "Output directory (default out/<dir>)");
    sweep->add_option("--format", sweep_opt.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    std::string ref_pcap, sta_pcap, bssid, csv_out;
    auto* ingest = app.add_subcommand("ingest", "Align a reference and a station capture by beacon");
    ingest->add_option("reference", ref_pcap, "Reference capture (classic pcap, radiotap)")->required()->check(CLI::ExistingFile);
    ingest->add_option("station", sta_pcap, "Station capture (classic pcap, radiotap)")->required()->check(CLI::ExistingFile);
    ingest->add_option("--bssid", bssid, "Only use beacons from this BSSID");
    ingest->add_option("--out", csv_out, "Write the aligned beacons as CSV");

    std::string trace_a, trace_b;
    auto* diff = app.add_subcommand("trace-diff", "Compare two event traces");
    diff->add_option("a", trace_a, "First trace")->required()->check(CLI::ExistingFile);
    diff->add_option("b", trace_b, "Second trace")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(scenario, run_opt);
        if (*sweep) return cmd_sweep(sweep_dir, sweep_opt);
        if (*ingest) return cmd_ingest(ref_pcap, sta_pcap, bssid, csv_out);
        if (*diff) return cmd_trace_diff(trace_a, trace_b);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
