#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "sim_fixtures.hpp"
#include "slicesim/common/error.hpp"
#include "slicesim/sim/compare.hpp"
#include "slicesim/sim/live.hpp"

using namespace slicesim;
using fixtures::preset;
using nlohmann::json;

namespace {

sim::ScenarioConfig with(const char* base, const std::function<void(json&)>& edit) {
    auto j = sim::to_json(*sim::find_preset(base));
    edit(j);
    return sim::scenario_from_json(j);
}

}  // namespace

TEST_CASE("scenario files round-trip") {
    for (const auto& name : sim::preset_names()) {
        const auto j = sim::to_json(*sim::find_preset(name));
        CHECK(sim::to_json(sim::scenario_from_json(j)) == j);
        CHECK(sim::to_json(sim::load_scenario("preset:" + name)) == j);
    }
    auto c = *sim::find_preset("paper-sliced");
    c.link.loss_p = 0.01;
    c.intra_slice_policy = radio::IntraSlicePolicy::PriorityClasses;
    c.robot.path.kind = apps::PathKind::StraightLine;
    c.operator_app.mode = apps::EventSourceConfig::Mode::Scripted;
    c.operator_app.times_s = {1.0, 2.5};
    {
        sim::TimelineAction up;
        up.t_s = 40;
        up.kind = sim::TimelineAction::Kind::UpdateSlice;
        up.slice_id = 1;
        up.patch = {{"label", "ctl"}};
        c.timeline.push_back(up);
    }
    const auto j = sim::to_json(c);
    CHECK(sim::to_json(sim::scenario_from_json(j)) == j);
}

TEST_CASE("scenario validation rejects bad files") {
    auto rejects = [](const std::function<void(json&)>& edit) {
        CHECK_THROWS_AS(with("paper-sliced", edit), ConfigError);
    };
    rejects([](json& j) { j["surprise"] = 1; });
    rejects([](json& j) { j["robot"]["wheel_radius"] = -1.0; });
    rejects([](json& j) { j["duration_s"] = 0; });
    rejects([](json& j) { j["duration_s"] = 1.0005; });
    rejects([](json& j) { j["stats_period_s"] = 0.0; });
    rejects([](json& j) { j["mode"] = "sideways"; });
    rejects([](json& j) { j["cell"] = "lte3"; });
    rejects([](json& j) { j["link"]["loss_p"] = 1.0; });
    rejects([](json& j) { j["ues"][0]["slice_id"] = 7; });
    rejects([](json& j) { j["ues"][1]["rnti"] = j["ues"][0]["rnti"]; });
    rejects([](json& j) { j["slices"][1]["dl_share"] = 0.96; });
    rejects([](json& j) { j["slices"][1]["slice_id"] = 1; });
    rejects([](json& j) { j["timeline"][0]["slice_id"] = 9; });
    rejects([](json& j) { j["timeline"][0]["t"] = 61.0; });
    rejects([](json& j) { j["video"]["bitrate_bps"] = 0; });
    rejects([](json& j) { j["operator"]["deadline_s"] = -1; });
    CHECK_THROWS_AS(with("paper-baseline", [](json& j) { j["timeline"] = json::array({{{"t", 1.0}, {"action", "enable_autoscale"}}}); }),
                    ConfigError);
    CHECK_THROWS_AS(with("paper-baseline", [](json& j) { j["baseline_pool_share"] = 0.0; }), ConfigError);
    CHECK_THROWS_AS(sim::load_scenario("preset:nope"), ConfigError);
    CHECK_THROWS_AS(sim::load_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST_CASE("presets") {
    CHECK(sim::preset_names() == std::vector<std::string>{"paper-baseline", "paper-sliced"});
    const auto b = *sim::find_preset("paper-baseline");
    const auto s = *sim::find_preset("paper-sliced");
    CHECK(b.mode == sim::Mode::Baseline);
    CHECK(b.cell.prb_count == 50);
    CHECK(s.slices.size() == 2);
    CHECK(s.slices[0].dl_share == radio::Share::from_fraction(0.05));
    CHECK(s.slices[1].dl_share == radio::Share::from_fraction(0.95));
    REQUIRE(s.timeline.size() == 1);
    CHECK(s.timeline[0].rnti == sim::kVideoRnti);
    CHECK(s.timeline[0].t_s == 30.0);
    CHECK(b.seed == s.seed);
    CHECK_FALSE(sim::find_preset("sliced"));
}

TEST_CASE("a scenario without UEs idles through its duration") {
    sim::ScenarioConfig c;
    c.duration_s = 1.0;
    const auto r = sim::run_scenario(c);
    CHECK(r.ttis == 1000);
    CHECK(r.duration_s == doctest::Approx(1.0));
    CHECK(r.throughput.empty());
    CHECK(r.robots.empty());
    CHECK(r.slice_shares.empty());
}

TEST_CASE("identical seeds give identical reports, different seeds may not") {
    auto c = preset("paper-sliced", 3.0);
    c.link.loss_p = 0.05;
    const auto a = sim::canonical(sim::run_scenario(c));
    CHECK(a == sim::canonical(sim::run_scenario(c)));
    c.seed += 1;
    CHECK(a != sim::canonical(sim::run_scenario(c)));
}

TEST_CASE("every TTI is work conserving and respects slice bindings") {
    auto c = preset("paper-sliced", 4.0);
    c.timeline[0].t_s = 2.0;
    std::int64_t checked = 0, full = 0;
    sim::EngineHooks hooks;
    hooks.on_tti = [&](const sim::TtiTrace& t) {
        for (const auto* alloc : {&t.downlink, &t.uplink}) {
            std::map<radio::Rnti, std::int64_t> served;
            std::set<int> prbs;
            for (const auto& g : alloc->grants) {
                served[g.rnti] += g.bits_served;
                CHECK(prbs.insert(g.prb_index).second);
            }
            bool left_over = false;
            for (const auto& u : t.demand) {
                left_over |= u.queue_bytes(alloc->direction) * 8 > served[u.rnti];
            }
            ++checked;
            if (left_over) {
                ++full;
                CHECK(alloc->grants.size() == 50u);
            }
        }
    };
    sim::run_scenario(c, hooks);
    CHECK(checked == 8000);
    CHECK(full > 0);
}

TEST_CASE("relocation regroups the UE at the next boundary") {
    const auto r = sim::run_scenario(preset("paper-sliced", 32.0));
    for (const auto& p : r.throughput) {
        if (p.rnti != sim::kVideoRnti) continue;
        CHECK(p.slice_id == (p.t <= 30.0 + 1e-9 ? 1 : 2));
    }
    CHECK(r.rejected_commands.empty());
    CHECK(r.commands.empty());  // timeline actions are not external commands
}

TEST_CASE("stats history and telemetry follow the stats period") {
    sim::Engine e(preset("paper-sliced", 2.0));
    auto r = e.run();
    CHECK(e.control_plane().history().size() == 20);
    CHECK(r.throughput.size() == 60);
    CHECK(r.throughput.front().t == doctest::Approx(0.1));
    const auto snap = e.control_plane().snapshot();
    CHECK(snap->tti == 2000);
}

TEST_CASE("a partial final stats period is still reported") {
    auto c = preset("paper-sliced", 1.05);
    const auto r = sim::run_scenario(c);
    CHECK(r.throughput.back().t == doctest::Approx(1.05));
}

TEST_CASE("losses delay control traffic but keep the byte ledger balanced") {
    auto c = preset("paper-sliced", 10.0);
    c.link.loss_p = 0.2;
    const auto r = sim::run_scenario(c);
    REQUIRE(r.robots.size() == 1);
    const auto& rb = r.robots[0];
    CHECK(*rb.rtt.p50 == doctest::Approx(6.0));
    CHECK(*rb.rtt.p99 >= 6.0 + 8.0);
    CHECK(r.audit_violations.empty());
}

TEST_CASE("operator events meet their deadline on an unloaded slice") {
    auto c = preset("paper-sliced", 20.0);
    c.operator_app.rate_hz = 5.0;
    const auto r = sim::run_scenario(c);
    REQUIRE(r.operators.size() == 1);
    const auto& o = r.operators[0];
    CHECK(o.emitted > 50);
    CHECK(o.delivered <= o.emitted);
    CHECK(o.due == o.delivered);
    CHECK(o.deadline_met_fraction == 1.0);
    for (double l : o.latency_ms) CHECK(l < 50.0);
}

TEST_CASE("percentiles are nearest-rank") {
    CHECK_FALSE(sim::percentiles({}).p50);
    const auto p = sim::percentiles({5, 1, 4, 2, 3});
    CHECK(*p.p50 == 3);
    CHECK(*p.p95 == 5);
    std::vector<double> hundred;
    for (int i = 1; i <= 100; ++i) hundred.push_back(i);
    CHECK(*sim::percentiles(hundred).p99 == 99);
}

TEST_CASE("reports export CSV and compare") {
    const auto dir = std::filesystem::temp_directory_path() / "slicesim_csv_test";
    std::filesystem::remove_all(dir);
    const auto a = sim::run_scenario(preset("paper-baseline", 10.0));
    const auto b = sim::run_scenario(preset("paper-sliced", 10.0));
    sim::write_csv(b, dir);
    for (const char* f : {"throughput.csv", "cross_track.csv", "rtt.csv", "event_latency.csv"}) {
        std::ifstream in(dir / f);
        std::string header;
        std::getline(in, header);
        CHECK_FALSE(header.empty());
    }
    std::ifstream tp(dir / "throughput.csv");
    CHECK(std::count(std::istreambuf_iterator<char>(tp), {}, '\n') == 1 + 3 * 100);
    std::filesystem::remove_all(dir);

    const auto ja = sim::to_json(a);
    const auto same = sim::compare_runs(ja, ja);
    CHECK(same["better"] == 0);
    CHECK(same["worse"] == 0);
    const auto d = sim::compare_runs(ja, sim::to_json(b));
    CHECK(d["headline"]["video_goodput_bps"]["verdict"] == "better");
    CHECK(d["headline"]["video_stall_count"]["delta"].get<double>() < 0);
    CHECK(d["flags"]["stalls_reduced"] == true);
    CHECK(d["flags"]["goodput_improved"] == true);
    CHECK(d["flags"]["rtt_p99_within_1ms"] == true);
    CHECK(same["flags"]["stalls_reduced"] == false);
    for (const auto& [k, m] : same["headline"].items()) {
        if (m["delta"].is_number()) CHECK(m["delta"] == 0.0);
    }
    CHECK_THROWS_AS(sim::compare_runs(ja, sim::to_json(sim::run_scenario(preset("paper-sliced", 4.0)))), ConfigError);
    CHECK_THROWS_AS(sim::compare_runs(ja, json::object()), ConfigError);
}

TEST_CASE("command logs round-trip and reject garbage") {
    sim::Report r;
    r.commands = {{12, {{"type", "relocate_ue"}, {"rnti", 5}, {"slice_id", 2}}}};
    r.stopped_at_tti = 99;
    const auto log = sim::command_log_from_json(sim::command_log_json(r));
    REQUIRE(log.commands.size() == 1);
    CHECK(log.commands[0].tti == 12);
    CHECK(log.commands[0].message == r.commands[0].message);
    CHECK(log.stopped_at_tti == 99u);
    CHECK_THROWS_AS(sim::command_log_from_json(json::array()), ConfigError);
    CHECK_THROWS_AS(sim::command_log_from_json({{"commands", {{{"tti", "x"}}}}}), ConfigError);
}

TEST_CASE("externally submitted commands replay to the same report") {
    auto c = preset("paper-sliced", 6.0);
    c.timeline.clear();
    sim::Engine e(c);
    e.step_until(1234);
    e.control_plane().submit(control::UeRelocation{sim::kVideoRnti, 2});
    e.step_until(2500);
    auto patched = control::SliceCommand::update({2, "data", radio::Share::from_fraction(0.9),
                                                  radio::Share::from_fraction(0.9), 1, radio::RbAvailability::Low});
    e.control_plane().submit(patched);
    e.step_until(4000);
    e.request_stop();
    e.step_until(6000);
    const auto live = e.finish();
    CHECK(live.stopped_at_tti == 4000u);
    CHECK(live.duration_s == doctest::Approx(4.0));
    REQUIRE(live.commands.size() == 2);
    CHECK(live.commands[0].tti == 1234);
    CHECK(live.commands[1].tti == 2500);

    const auto again = sim::replay(c, sim::command_log_from_json(sim::command_log_json(live)));
    CHECK(sim::canonical(again) == sim::canonical(live));
}

TEST_CASE("live sessions pace, serve and stop") {
    auto c = preset("paper-sliced", 60.0);
    CHECK_THROWS_AS(sim::LiveSession(c, 0.0), ConfigError);
    sim::LiveSession s(c, 20.0);
    CHECK_FALSE(s.started());
    s.start();
    s.start();
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    s.control_plane().submit(control::UeRelocation{sim::kVideoRnti, 2});
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    s.stop();
    const auto r = s.wait();
    REQUIRE(r.stopped_at_tti);
    // 0.5 s of wall time at 20x is about 10 s of simulated time.
    CHECK(*r.stopped_at_tti > 4000);
    CHECK(*r.stopped_at_tti < 30000);
    CHECK(r.commands.size() == 1);
    const auto again = sim::replay(c, sim::command_log_from_json(sim::command_log_json(r)));
    CHECK(sim::canonical(again) == sim::canonical(r));
}

TEST_CASE("timeline slice updates and rejected actions") {
    auto c = preset("paper-sliced", 3.0);
    sim::TimelineAction up;
    up.t_s = 1.0;
    up.kind = sim::TimelineAction::Kind::UpdateSlice;
    up.slice_id = 1;
    up.patch = {{"dl_share", 0.2}, {"ul_share", 0.2}};
    c.timeline = {up};
    // Slice 2 still holds 95%, so raising slice 1 overflows the grid.
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.slices[1].dl_share = radio::Share::from_fraction(0.8);
    c.slices[1].ul_share = radio::Share::from_fraction(0.8);
    c.validate();
    const auto r = sim::run_scenario(c);
    REQUIRE(r.slice_shares.size() == 2);
    // 1 s at 5% then 2 s at 20%.
    CHECK(r.slice_shares[0].configured[0] == doctest::Approx((0.05 + 2 * 0.2) / 3));
}

TEST_CASE("pace 10 runs ten times faster than the wall clock") {
    sim::LiveSession s(preset("paper-sliced", 3.0), 10.0);
    const auto t0 = std::chrono::steady_clock::now();
    s.start();
    const auto r = s.wait();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(r.ttis == 3000);
    CHECK_FALSE(r.stopped_at_tti);
    CHECK(wall >= 0.29);
    CHECK(wall < 0.6);
    CHECK(s.control_plane().closed());
}
