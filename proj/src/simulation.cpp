#include "beaconsync/simulation.hpp"

#include "beaconsync/baseline.hpp"
#include "beaconsync/clock.hpp"

#include <deque>
#include <set>
#include <fstream>
#include <memory>
#include <sstream>
#include <string_view>
#include <variant>

namespace beaconsync {

namespace {

constexpr std::size_t kReferenceReceiver = 0;
constexpr const char* kReferenceName = "reference";
constexpr std::size_t kArrivalMemory = 64;

enum StreamTag : std::uint64_t {
    kStreamStationClock = 1,
    kStreamStationDrift,
    kStreamBeaconLink,
    kStreamPubsubLink,
    kStreamResidual,
    kStreamBaselineClock,
    kStreamDownlink,
    kStreamUplink,
    kStreamStack,
};

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

struct BeaconTx {
    std::size_t ap;
    std::size_t index;
};
struct BeaconRx {
    std::size_t ap;
    std::size_t receiver;
    Octets frame;
};
struct TupleRx {
    std::size_t station;
    Octets message;
};
struct Tick {};
struct SyncTx {
    std::size_t station;
};
struct SyncRx {
    std::size_t station;
    PartialExchange x;
    SimTime sent;
};
struct DelayReqTx {
    std::size_t station;
    PartialExchange x;
    SimTime sent;
    SimTime received;
};
struct DelayReqRx {
    std::size_t station;
    PartialExchange x;
    SimTime sent;
    SimTime received;
    SimTime req_sent;
};

using Event = std::variant<BeaconTx, BeaconRx, TupleRx, Tick, SyncTx, SyncRx, DelayReqTx, DelayReqRx>;

struct StationRuntime {
    const StationParams* params;
    std::string name;
    Clock clock;
    StationSync sync;
    SequenceTracker sequences;
    LinkModel pubsub_model;
    std::map<MacAddress, std::unique_ptr<Link>> pubsub_links;
    std::map<BeaconKey, SimTime> true_arrivals;
    std::deque<BeaconKey> arrival_order;
    // Baseline
    Clock baseline_clock;
    PtpSlave ptp;
    std::unique_ptr<Link> downlink;
    std::unique_ptr<Link> uplink;
    std::unique_ptr<Link> stack;
};

class Simulation {
public:
    explicit Simulation(const ScenarioConfig& cfg)
        : cfg_(cfg),
          horizon_(SimTime(0) + cfg.duration),
          beacon_method_(cfg.method != Method::ptp_baseline),
          baseline_method_(cfg.method != Method::beacon_sync),
          ref_clock_(residual_model(cfg), cfg.reference.timestamp_granularity),
          baseline_master_(residual_model(cfg), cfg.baseline.timestamp_granularity),
          reference_(ReferenceStation::Config{.publisher_id = cfg.reference.publisher_id,
                                              .bssid_filter = cfg.reference.bssid_filter,
                                              .beacon_interval_tu = cfg.aps.front().beacon_interval_tu})
    {
        validate(cfg_);
        result_.scenario = cfg.name;
        capture_reference_ = cfg.output.reference_pcap.has_value();

        for (const auto& st : cfg.stations) {
            const std::uint64_t key = fnv1a(st.id);
            std::int64_t drift = st.clock.drift_ppb;
            if (st.clock.drift_range_ppb) {
                Rng r(stream_id({cfg.seed, kStreamStationDrift, key}));
                drift = r.uniform_int(-*st.clock.drift_range_ppb, *st.clock.drift_range_ppb);
            }
            result_.station_drift_ppb[st.id] = drift;
            ClockModel model{st.clock.offset, drift, st.clock.granularity, st.clock.read_noise_std,
                             stream_id({cfg.seed, kStreamStationClock, key})};
            ClockModel baseline_model = model;
            baseline_model.granularity = cfg.baseline.timestamp_granularity;
            baseline_model.rng_stream_id = stream_id({cfg.seed, kStreamBaselineClock, key});

            auto rt = std::make_unique<StationRuntime>(StationRuntime{
                &st, st.id, Clock(model),
                StationSync(StationSync::Config{.bssid_filter = st.bssid_filter,
                                                .beacon_interval_tu = cfg.aps.front().beacon_interval_tu,
                                                .two_point_drift = st.two_point_drift}),
                SequenceTracker{}, st.pubsub_link.value_or(cfg.pubsub_link), {}, {}, {}, Clock(baseline_model),
                PtpSlave{}, std::make_unique<Link>(cfg.baseline.downlink, stream_id({cfg.seed, kStreamDownlink, key})),
                std::make_unique<Link>(cfg.baseline.uplink, stream_id({cfg.seed, kStreamUplink, key})),
                std::make_unique<Link>(cfg.baseline.stack, stream_id({cfg.seed, kStreamStack, key}))});
            stations_.push_back(std::move(rt));
            if (cfg.output.station_pcaps.count(st.id)) capture_station_.insert(st.id);
        }

        for (std::size_t a = 0; a < cfg.aps.size(); ++a) {
            const auto& ap = cfg.aps[a];
            schedules_.push_back(schedule_beacons(
                ApModel{ap.bssid, ap.beacon_interval_tu, SimTime(0) + ap.tsf_origin, ap.tsf_drift_ppb}, horizon_));
            std::vector<std::unique_ptr<Link>> links;
            links.push_back(std::make_unique<Link>(
                cfg.reference.beacon_link, stream_id({cfg.seed, kStreamBeaconLink, ap.bssid.as_u64(), 0})));
            for (const auto& st : cfg.stations) {
                links.push_back(std::make_unique<Link>(
                    st.beacon_link, stream_id({cfg.seed, kStreamBeaconLink, ap.bssid.as_u64(), fnv1a(st.id)})));
            }
            beacon_links_.push_back(std::move(links));
        }
    }

    RunResult run()
    {
        for (std::size_t a = 0; a < schedules_.size(); ++a) {
            if (!schedules_[a].empty()) queue_.schedule(schedules_[a].front().at, BeaconTx{a, 0});
        }
        if (SimTime(0) + cfg_.eval_tick <= horizon_) queue_.schedule(SimTime(0) + cfg_.eval_tick, Tick{});
        if (baseline_method_ && SimTime(0) + cfg_.baseline.sync_interval <= horizon_) {
            for (std::size_t s = 0; s < stations_.size(); ++s)
                queue_.schedule(SimTime(0) + cfg_.baseline.sync_interval, SyncTx{s});
        }

        while (!queue_.empty() && queue_.next_due() <= horizon_) {
            auto entry = queue_.pop();
            now_ = entry.due;
            std::visit([this](auto& ev) { handle(ev); }, entry.event);
        }
        finish();
        return std::move(result_);
    }

private:
    static GptpResidualModel residual_model(const ScenarioConfig& cfg)
    {
        GptpResidualModel m = cfg.reference.gptp;
        m.rng_stream_id = stream_id({cfg.seed, kStreamResidual});
        return m;
    }

    void count(const std::string& key, std::uint64_t n = 1) { result_.counters[key] += n; }

    void trace(std::string type, std::string src, std::string dst, std::string fields)
    {
        if (!cfg_.record_trace) return;
        result_.trace.push_back(TraceEvent{now_, std::move(type), std::move(src), std::move(dst), std::move(fields)});
    }

    std::string receiver_name(std::size_t r) const
    {
        return r == kReferenceReceiver ? std::string(kReferenceName) : stations_[r - 1]->name;
    }

    void handle(const BeaconTx& ev)
    {
        const auto& ap = cfg_.aps[ev.ap];
        const auto& emission = schedules_[ev.ap][ev.index];
        const std::string bssid = ap.bssid.to_string();
        count("beacons_sent");
        count("ap." + bssid + ".beacons_sent");
        trace("beacon_tx", bssid, "*", "tsf=" + std::to_string(emission.tsf));

        const Octets frame = encode_beacon(make_beacon(ap.bssid, emission.tsf, ap.beacon_interval_tu, emission.seq_ctl));
        std::vector<Link*> receivers;
        for (auto& l : beacon_links_[ev.ap]) receivers.push_back(l.get());
        for (const auto& d : deliver_broadcast(receivers, now_)) {
            const std::string name = receiver_name(d.receiver);
            if (d.arrival) {
                queue_.schedule(*d.arrival, BeaconRx{ev.ap, d.receiver, frame});
            } else {
                count("rx." + name + ".beacons_lost");
                trace("beacon_lost", bssid, name, "tsf=" + std::to_string(emission.tsf));
            }
        }
        if (ev.index + 1 < schedules_[ev.ap].size())
            queue_.schedule(schedules_[ev.ap][ev.index + 1].at, BeaconTx{ev.ap, ev.index + 1});
    }

    void handle(const BeaconRx& ev)
    {
        const BeaconFrame frame = decode_beacon(ev.frame);
        const std::string name = receiver_name(ev.receiver);
        count("rx." + name + ".beacons_received");
        trace("beacon_rx", frame.bssid.to_string(), name, "tsf=" + std::to_string(frame.timestamp));
        if (ev.receiver == kReferenceReceiver) {
            on_reference_beacon(frame);
        } else {
            on_station_beacon(*stations_[ev.receiver - 1], frame);
        }
    }

    void on_reference_beacon(const BeaconFrame& frame)
    {
        if (capture_reference_) {
            result_.reference_capture.push_back(beacon_capture(frame, ref_clock_.read(now_), frame.timestamp));
        }
        if (!reference_.accepts(frame.bssid)) {
            count("reference.filtered");
            return;
        }
        const SimTime tsn_now = ref_clock_.read(now_);
        auto msg = reference_.on_beacon(BeaconObservation{frame.bssid, frame.timestamp, tsn_now}, tsn_now);
        if (!msg) return;
        const Octets bytes = encode_network_message(*msg);
        append_record(result_.tuple_log, bytes);
        const auto seq = msg->header.sequence_number;
        count("tuples_sent");
        trace("tuple_tx", kReferenceName, "*",
              "seq=" + std::to_string(seq) + " t_bf=" + std::to_string(frame.timestamp) +
                  " t_tsn=" + std::to_string(tsn_now.nanos()));
        if (!beacon_method_) return;

        std::vector<Subscriber> subs;
        for (auto& st : stations_) {
            auto& link = st->pubsub_links[frame.bssid];
            if (!link) {
                link = std::make_unique<Link>(st->pubsub_model, stream_id({cfg_.seed, kStreamPubsubLink,
                                                                           fnv1a(st->name), frame.bssid.as_u64()}));
            }
            subs.push_back(Subscriber{link.get(), st->params->joined});
        }
        for (const auto& d : deliver_multicast(subs, now_)) {
            auto& st = *stations_[d.receiver];
            if (d.arrival) {
                queue_.schedule(*d.arrival, TupleRx{d.receiver, bytes});
            } else {
                count("sta." + st.name + ".tuples_lost");
                trace("tuple_lost", kReferenceName, st.name, "seq=" + std::to_string(seq));
            }
        }
    }

    void on_station_beacon(StationRuntime& st, const BeaconFrame& frame)
    {
        if (!st.sync.accepts(frame.bssid)) {
            st.sync.on_beacon(BeaconObservation{frame.bssid, frame.timestamp, SimTime(0)});
            return;
        }
        const SimTime local = st.clock.read(now_);
        if (capture_station_.count(st.name)) {
            result_.station_captures[st.name].push_back(beacon_capture(frame, local, frame.timestamp));
        }
        st.sync.on_beacon(BeaconObservation{frame.bssid, frame.timestamp, local});
        const BeaconKey key{frame.bssid, frame.timestamp};
        if (st.true_arrivals.emplace(key, now_).second) {
            st.arrival_order.push_back(key);
            if (st.arrival_order.size() > kArrivalMemory) {
                st.true_arrivals.erase(st.arrival_order.front());
                st.arrival_order.pop_front();
            }
        }
    }

    void handle(const TupleRx& ev)
    {
        auto& st = *stations_[ev.station];
        const std::string prefix = "sta." + st.name + ".";
        NetworkMessage msg;
        try {
            msg = decode_network_message(ev.message);
        } catch (const IntegrityError&) {
            count(prefix + "integrity_errors");
            trace("tuple_rx", kReferenceName, st.name, "result=integrity_error");
            return;
        }
        count(prefix + "tuples_received");
        const std::string seq = "seq=" + std::to_string(msg.header.sequence_number);
        if (!st.sequences.accept(msg)) {
            count(prefix + "tuples_reordered");
            trace("tuple_rx", kReferenceName, st.name, seq + " result=reordered");
            return;
        }
        const auto fields = tuple_fields(msg);
        const auto bssid = reference_.directory().bssid_for(fields.dataset_writer_id);
        if (!bssid) {
            count(prefix + "unknown_writer");
            trace("tuple_rx", kReferenceName, st.name, seq + " result=unknown_writer");
            return;
        }
        const auto before = st.sync.counters();
        const auto filtered_before = st.sync.filtered_tuples();
        auto c = st.sync.on_tuple(TimestampTuple{fields.t_bf, fields.t_tsn_at_bf, *bssid});
        std::string result = "matched";
        if (!c) {
            const auto& after = st.sync.counters();
            if (st.sync.filtered_tuples() != filtered_before) {
                result = "filtered";
            } else if (after.stale_tuples != before.stale_tuples) {
                result = "stale";
            } else {
                result = "missed";
            }
        }
        trace("tuple_rx", kReferenceName, st.name, seq + " t_bf=" + std::to_string(fields.t_bf) + " result=" + result);
        if (!c) return;

        CorrectionRecord rec{now_, st.name, c->t_bf, 0};
        auto it = st.true_arrivals.find(BeaconKey{c->bssid, c->t_bf});
        if (it != st.true_arrivals.end()) {
            rec.error_at_beacon_ns = (c->t_tsn_at_bf - it->second).count();
            result_.corrections.push_back(rec);
        }
    }

    void handle(const Tick&)
    {
        for (auto& stp : stations_) {
            auto& st = *stp;
            if (beacon_method_) {
                if (st.sync.synchronized()) {
                    const SimTime local = st.clock.read(now_);
                    try {
                        const auto est = st.sync.estimate(local);
                        result_.samples.push_back(
                            OffsetSample{now_, kMethodBeacon, st.name, (est.t_tsn_estimate - now_).count()});
                    } catch (const std::domain_error&) {
                        count("sta." + st.name + ".negative_age_ticks");
                    }
                } else {
                    count("sta." + st.name + ".unsynchronized_ticks");
                }
            }
            if (baseline_method_) {
                if (st.ptp.synchronized()) {
                    const SimTime master = st.ptp.master_time(st.baseline_clock.read(now_));
                    result_.samples.push_back(OffsetSample{now_, kMethodBaseline, st.name, (master - now_).count()});
                } else {
                    count("ptp." + st.name + ".unsynchronized_ticks");
                }
            }
        }
        const SimTime next = now_ + cfg_.eval_tick;
        if (next <= horizon_) queue_.schedule(next, Tick{});
    }

    void ptp_incomplete(StationRuntime& st, const PartialExchange& x, const char* where)
    {
        st.ptp.on_exchange(x);
        trace("ptp_lost", kReferenceName, st.name, std::string("leg=") + where);
    }

    void handle(const SyncTx& ev)
    {
        auto& st = *stations_[ev.station];
        PartialExchange x;
        x.t1 = baseline_master_.read(now_);
        trace("ptp_sync_tx", kReferenceName, st.name, "t1=" + std::to_string(x.t1->nanos()));
        const SimTime next = now_ + cfg_.baseline.sync_interval;
        if (next <= horizon_) queue_.schedule(next, SyncTx{ev.station});

        const auto mtx = st.stack->sample();
        const auto air = st.downlink->sample();
        const auto srx = st.stack->sample();
        if (!mtx || !air || !srx) {
            ptp_incomplete(st, x, "downlink");
            return;
        }
        queue_.schedule(now_ + *mtx + *air + *srx, SyncRx{ev.station, x, now_});
    }

    void handle(const SyncRx& ev)
    {
        auto& st = *stations_[ev.station];
        PartialExchange x = ev.x;
        x.t2 = st.baseline_clock.read(now_);
        trace("ptp_sync_rx", kReferenceName, st.name, "t2=" + std::to_string(x.t2->nanos()));
        queue_.schedule(now_ + cfg_.baseline.turnaround, DelayReqTx{ev.station, x, ev.sent, now_});
    }

    void handle(const DelayReqTx& ev)
    {
        auto& st = *stations_[ev.station];
        PartialExchange x = ev.x;
        x.t3 = st.baseline_clock.read(now_);
        trace("ptp_delay_req_tx", st.name, kReferenceName, "t3=" + std::to_string(x.t3->nanos()));
        const auto stx = st.stack->sample();
        const auto air = st.uplink->sample();
        const auto mrx = st.stack->sample();
        if (!stx || !air || !mrx) {
            ptp_incomplete(st, x, "uplink");
            return;
        }
        queue_.schedule(now_ + *stx + *air + *mrx, DelayReqRx{ev.station, x, ev.sent, ev.received, now_});
    }

    void handle(const DelayReqRx& ev)
    {
        auto& st = *stations_[ev.station];
        PartialExchange x = ev.x;
        x.t4 = baseline_master_.read(now_);
        trace("ptp_delay_req_rx", st.name, kReferenceName, "t4=" + std::to_string(x.t4->nanos()));
        const auto estimate = st.ptp.on_exchange(x);
        if (!estimate) return;
        const auto full = *x.complete();
        const std::int64_t true_offset =
            (ideal_reading(st.baseline_clock.model(), ev.sent) - reference_clock_read(ev.sent, baseline_master_.residual_model()))
                .count();
        result_.exchanges.push_back(ExchangeRecord{st.name, full, ev.received - ev.sent, now_ - ev.req_sent, *estimate,
                                                   ptp_offset_twice(full), true_offset});
    }

    void finish()
    {
        const auto& rc = reference_.counters();
        result_.counters["reference.published"] = rc.published;
        result_.counters["reference.duplicates"] = rc.duplicates;
        result_.counters["reference.restarts"] = rc.restarts;
        for (const auto& stp : stations_) {
            const auto& st = *stp;
            const std::string p = "sta." + st.name + ".";
            const auto& c = st.sync.counters();
            result_.counters[p + "matched"] = c.matched;
            result_.counters[p + "missed_tuples"] = c.missed_tuples;
            result_.counters[p + "stale_tuples"] = c.stale_tuples;
            result_.counters[p + "duplicate_beacons"] = c.duplicate_beacons;
            result_.counters[p + "filtered_beacons"] = st.sync.filtered_beacons();
            result_.counters[p + "filtered_tuples"] = st.sync.filtered_tuples();
            result_.station_states[st.name] = st.sync.snapshot();
            if (baseline_method_) {
                result_.counters["ptp." + st.name + ".exchanges_complete"] = st.ptp.completed();
                result_.counters["ptp." + st.name + ".exchanges_incomplete"] = st.ptp.incomplete();
            }
        }
    }

    const ScenarioConfig& cfg_;
    SimTime horizon_;
    SimTime now_;
    bool beacon_method_;
    bool baseline_method_;
    ReferenceClock ref_clock_;
    ReferenceClock baseline_master_;
    ReferenceStation reference_;
    std::vector<std::unique_ptr<StationRuntime>> stations_;
    std::vector<std::vector<BeaconEmission>> schedules_;
    std::vector<std::vector<std::unique_ptr<Link>>> beacon_links_;
    EventQueue<Event> queue_;
    bool capture_reference_ = false;
    std::set<std::string> capture_station_;
    RunResult result_;
};

void write_atomically(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_pcap_atomically(const std::filesystem::path& path, const std::vector<CaptureRecord>& records)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    write_pcap(tmp, records);
    std::filesystem::rename(tmp, path);
}

} // namespace

RunResult run_scenario(const ScenarioConfig& cfg)
{
    validate(cfg);
    Simulation sim(cfg);
    return sim.run();
}

std::string trace_text(const std::vector<TraceEvent>& trace)
{
    std::string out;
    for (const auto& e : trace) {
        out += format_trace_line(e);
        out += '\n';
    }
    return out;
}

std::string samples_csv(const std::vector<OffsetSample>& samples)
{
    std::ostringstream out;
    write_samples_csv(out, samples);
    return out.str();
}

void write_outputs(const ScenarioConfig& cfg, const RunResult& result, const std::filesystem::path& out_dir,
                   const std::string& report_format)
{
    const std::filesystem::path base = out_dir.empty() ? cfg.base_dir : out_dir;
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
    };
    const auto& o = cfg.output;
    if (o.samples_csv) write_atomically(resolve(*o.samples_csv), samples_csv(result.samples));
    if (o.trace) write_atomically(resolve(*o.trace), trace_text(result.trace));
    if (o.report && !result.samples.empty()) {
        const Report r = summarize(result.scenario, result.samples, result.counters);
        write_atomically(resolve(*o.report), report_format == "csv" ? report_csv(r) : report_json(r));
    }
    if (o.reference_pcap) write_pcap_atomically(resolve(*o.reference_pcap), result.reference_capture);
    for (const auto& [id, path] : o.station_pcaps) {
        auto it = result.station_captures.find(id);
        write_pcap_atomically(resolve(path), it == result.station_captures.end() ? std::vector<CaptureRecord>{} : it->second);
    }
    if (o.tuple_log) {
        write_atomically(resolve(*o.tuple_log), std::string(result.tuple_log.begin(), result.tuple_log.end()));
    }
}

} // namespace beaconsync
