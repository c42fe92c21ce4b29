#include "slicesim/sim/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "slicesim/common/error.hpp"

namespace slicesim::sim {

Percentiles percentiles(std::vector<double> samples) {
    Percentiles p;
    if (samples.empty()) return p;
    std::sort(samples.begin(), samples.end());
    auto rank = [&](double q) {
        auto n = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
        return samples[std::clamp<std::size_t>(n, 1, samples.size()) - 1];
    };
    p.p50 = rank(0.50);
    p.p95 = rank(0.95);
    p.p99 = rank(0.99);
    return p;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const Percentiles& p) { return {{"p50", opt(p.p50)}, {"p95", opt(p.p95)}, {"p99", opt(p.p99)}}; }

json summary(const Report& r) {
    std::vector<double> rtt;
    double worst_rms = 0.0;
    for (const auto& rb : r.robots) {
        rtt.insert(rtt.end(), rb.rtt_ms.begin(), rb.rtt_ms.end());
        worst_rms = std::max(worst_rms, rb.cross_track_rms_m);
    }
    std::int64_t met = 0, due = 0;
    for (const auto& o : r.operators) {
        met += o.deadline_met;
        due += o.due;
    }
    int stalls = 0;
    double goodput = 0.0;
    for (const auto& v : r.videos) {
        stalls += v.stall_count;
        goodput += v.goodput_bps;
    }
    json s;
    s["robot_rtt_ms"] = to_json(percentiles(std::move(rtt)));
    s["cross_track_rms_m"] = r.robots.empty() ? json(nullptr) : json(worst_rms);
    s["deadline_met_fraction"] =
        r.operators.empty() ? json(nullptr) : json(due == 0 ? 1.0 : static_cast<double>(met) / static_cast<double>(due));
    s["video_stall_count"] = stalls;
    s["video_goodput_bps"] = goodput;
    return s;
}

}  // namespace

json to_json(const Report& r) {
    json j;
    j["version"] = r.version;
    j["config"] = r.config;
    j["duration_s"] = r.duration_s;
    j["stats_period_s"] = r.stats_period_s;
    j["ttis"] = r.ttis;
    j["stopped_at_tti"] = r.stopped_at_tti ? json(*r.stopped_at_tti) : json(nullptr);
    j["summary"] = summary(r);

    j["throughput"] = json::array();
    for (const auto& p : r.throughput) {
        j["throughput"].push_back(
            {{"t", p.t}, {"rnti", p.rnti}, {"slice_id", p.slice_id}, {"dl_mbps", p.dl_mbps}, {"ul_mbps", p.ul_mbps}});
    }

    j["robots"] = json::array();
    for (const auto& rb : r.robots) {
        json ct = json::array();
        for (const auto& c : rb.cross_track) ct.push_back({c.t, c.error_m});
        j["robots"].push_back({{"rnti", rb.rnti},
                               {"rtt_ms", rb.rtt_ms},
                               {"rtt_percentiles_ms", to_json(rb.rtt)},
                               {"cross_track", ct},
                               {"settle_time_s", rb.settle_time_s},
                               {"cross_track_rms_m", rb.cross_track_rms_m}});
    }

    j["operators"] = json::array();
    for (const auto& o : r.operators) {
        j["operators"].push_back({{"rnti", o.rnti},
                                  {"latency_ms", o.latency_ms},
                                  {"latency_percentiles_ms", to_json(percentiles(o.latency_ms))},
                                  {"emitted", o.emitted},
                                  {"delivered", o.delivered},
                                  {"deadline_met", o.deadline_met},
                                  {"due", o.due},
                                  {"deadline_met_fraction", o.deadline_met_fraction}});
    }

    j["videos"] = json::array();
    for (const auto& v : r.videos) {
        json stalls = json::array();
        for (const auto& s : v.stalls) stalls.push_back({{"start", s.start}, {"end", opt(s.end)}});
        j["videos"].push_back({{"rnti", v.rnti},
                               {"bitrate_bps", v.bitrate_bps},
                               {"delivered_bytes", v.delivered_bytes},
                               {"goodput_bps", v.goodput_bps},
                               {"stall_count", v.stall_count},
                               {"total_stall_duration_s", v.total_stall_duration_s},
                               {"playback_start_s", opt(v.playback_start_s)},
                               {"stalls", stalls}});
    }

    j["slice_shares"] = json::array();
    for (const auto& s : r.slice_shares) {
        j["slice_shares"].push_back({{"slice_id", s.slice_id},
                                     {"configured_dl", s.configured[0]},
                                     {"configured_ul", s.configured[1]},
                                     {"realized_dl", s.realized[0]},
                                     {"realized_ul", s.realized[1]}});
    }

    j["audit_violations"] = r.audit_violations;
    j["rejected_commands"] = json::array();
    for (const auto& c : r.rejected_commands) {
        j["rejected_commands"].push_back(
            {{"tti", c.tti}, {"origin", c.origin}, {"message", c.message}, {"error", c.error}});
    }
    j["commands"] = command_log_json(r)["commands"];
    return j;
}

std::string canonical(const Report& r) { return to_json(r).dump(2) + "\n"; }

void write_csv(const Report& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        f.precision(9);
        return f;
    };
    {
        auto f = open("throughput.csv");
        f << "t,rnti,slice_id,dl_mbps,ul_mbps\n";
        for (const auto& p : r.throughput) {
            f << p.t << ',' << p.rnti << ',' << p.slice_id << ',' << p.dl_mbps << ',' << p.ul_mbps << '\n';
        }
    }
    {
        auto f = open("cross_track.csv");
        f << "rnti,t,error_m\n";
        for (const auto& rb : r.robots) {
            for (const auto& c : rb.cross_track) f << rb.rnti << ',' << c.t << ',' << c.error_m << '\n';
        }
    }
    {
        auto f = open("rtt.csv");
        f << "rnti,sample,rtt_ms\n";
        for (const auto& rb : r.robots) {
            for (std::size_t i = 0; i < rb.rtt_ms.size(); ++i) f << rb.rnti << ',' << i << ',' << rb.rtt_ms[i] << '\n';
        }
    }
    {
        auto f = open("event_latency.csv");
        f << "rnti,event,latency_ms\n";
        for (const auto& o : r.operators) {
            for (std::size_t i = 0; i < o.latency_ms.size(); ++i) {
                f << o.rnti << ',' << i << ',' << o.latency_ms[i] << '\n';
            }
        }
    }
}

json command_log_json(const Report& r) {
    json cmds = json::array();
    for (const auto& c : r.commands) cmds.push_back({{"tti", c.tti}, {"message", c.message}});
    return {{"commands", cmds}, {"stopped_at_tti", r.stopped_at_tti ? json(*r.stopped_at_tti) : json(nullptr)}};
}

CommandLog command_log_from_json(const json& j) {
    CommandLog log;
    try {
        if (!j.is_object() || !j.contains("commands") || !j.at("commands").is_array()) {
            throw ConfigError("command log needs a \"commands\" array");
        }
        for (const auto& c : j.at("commands")) {
            log.commands.push_back({c.at("tti").get<std::uint64_t>(), c.at("message")});
        }
        if (j.contains("stopped_at_tti") && !j.at("stopped_at_tti").is_null()) {
            log.stopped_at_tti = j.at("stopped_at_tti").get<std::uint64_t>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed command log: ") + e.what());
    }
    return log;
}

VideoWindow video_window(const Report& r, Rnti rnti, double from, double to) {
    VideoWindow w;
    if (to <= from) return w;
    // Periods are identified by their end instant.
    double bits = 0.0;
    for (const auto& p : r.throughput) {
        if (p.rnti == rnti && p.t > from + 1e-9 && p.t <= to + 1e-9) {
            const double len = std::min(r.stats_period_s, p.t - std::max(from, p.t - r.stats_period_s));
            bits += p.dl_mbps * 1e6 * len;
        }
    }
    w.goodput_bps = bits / (to - from);
    for (const auto& v : r.videos) {
        if (v.rnti != rnti) continue;
        for (const auto& s : v.stalls) {
            const double end = s.end.value_or(to);
            if (s.start <= to && end > from) ++w.stalls;
        }
    }
    return w;
}

}  // namespace slicesim::sim
