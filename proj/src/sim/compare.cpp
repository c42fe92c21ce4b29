#include "slicesim/sim/compare.hpp"

#include <cmath>
#include <map>
#include <string>

#include "slicesim/common/error.hpp"

namespace slicesim::sim {

namespace {

constexpr double kRttToleranceMs = 1.0;

const json& field(const json& j, const char* key, const char* which) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(std::string(which) + " report has no \"" + key + "\"");
    }
    return j.at(key);
}

// Lower is better unless `higher_better`.
json metric(const json& a, const json& b, bool higher_better) {
    json m{{"a", a}, {"b", b}, {"delta", nullptr}, {"verdict", "n/a"}};
    if (!a.is_number() || !b.is_number()) return m;
    const double x = a.get<double>();
    const double y = b.get<double>();
    const double d = y - x;
    m["delta"] = d;
    const double eps = 1e-9 * std::max({1.0, std::abs(x), std::abs(y)});
    if (std::abs(d) <= eps) {
        m["verdict"] = "same";
    } else {
        m["verdict"] = (d > 0) == higher_better ? "better" : "worse";
    }
    return m;
}

}  // namespace

json compare_runs(const json& a, const json& b) {
    for (const char* key : {"duration_s", "stats_period_s"}) {
        const auto& x = field(a, key, "first");
        const auto& y = field(b, key, "second");
        if (!x.is_number() || !y.is_number() || std::abs(x.get<double>() - y.get<double>()) > 1e-9) {
            throw ConfigError(std::string("reports differ in ") + key + ": " + x.dump() + " vs " + y.dump());
        }
    }
    const auto& sa = field(a, "summary", "first");
    const auto& sb = field(b, "summary", "second");

    json out;
    out["duration_s"] = a.at("duration_s");
    out["stats_period_s"] = a.at("stats_period_s");
    json h;
    for (const char* p : {"p50", "p95", "p99"}) {
        h[std::string("robot_rtt_") + p + "_ms"] =
            metric(sa.at("robot_rtt_ms").at(p), sb.at("robot_rtt_ms").at(p), false);
    }
    h["cross_track_rms_m"] = metric(sa.at("cross_track_rms_m"), sb.at("cross_track_rms_m"), false);
    h["deadline_met_fraction"] = metric(sa.at("deadline_met_fraction"), sb.at("deadline_met_fraction"), true);
    h["video_stall_count"] = metric(sa.at("video_stall_count"), sb.at("video_stall_count"), false);
    h["video_goodput_bps"] = metric(sa.at("video_goodput_bps"), sb.at("video_goodput_bps"), true);
    out["headline"] = h;

    // Realized shares side by side, keyed by slice id.
    std::map<std::int64_t, json> shares;
    auto collect = [&](const json& r, const char* side) {
        if (!r.contains("slice_shares")) return;
        for (const auto& s : r.at("slice_shares")) {
            auto& e = shares[s.at("slice_id").get<std::int64_t>()];
            e["slice_id"] = s.at("slice_id");
            e[side] = {{"realized_dl", s.at("realized_dl")}, {"realized_ul", s.at("realized_ul")}};
        }
    };
    collect(a, "a");
    collect(b, "b");
    out["slice_shares"] = json::array();
    for (auto& [id, e] : shares) out["slice_shares"].push_back(e);

    // The headline contrast: fewer stalls, control RTT unchanged.
    auto delta = [&](const char* k) { return h.at(k).at("delta"); };
    const auto stalls = delta("video_stall_count");
    const auto rtt = delta("robot_rtt_p99_ms");
    out["flags"] = {
        {"stalls_reduced", stalls.is_number() && stalls.get<double>() < 0},
        {"goodput_improved", h.at("video_goodput_bps").at("verdict") == "better"},
        {"rtt_p99_within_1ms", rtt.is_number() && std::abs(rtt.get<double>()) <= kRttToleranceMs},
    };

    int better = 0, worse = 0;
    for (const auto& [k, m] : h.items()) {
        better += m.at("verdict") == "better";
        worse += m.at("verdict") == "worse";
    }
    out["better"] = better;
    out["worse"] = worse;
    return out;
}

}  // namespace slicesim::sim
