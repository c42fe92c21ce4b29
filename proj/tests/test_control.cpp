#include <random>
#include <set>

#include "control_fixtures.hpp"
#include "doctest.h"
#include "slicesim/common/error.hpp"
#include "slicesim/control/agent.hpp"
#include "slicesim/control/codec.hpp"
#include "slicesim/control/control_plane.hpp"
#include "slicesim/control/stats.hpp"
#include "slicesim/radio/scheduler.hpp"

using namespace slicesim;
using namespace slicesim::control;
using fixtures::descriptor;
using radio::RbAvailability;
using radio::Share;
using namespace std::chrono_literals;

namespace {

ErrorCode error_of(auto&& fn) {
    try {
        fn();
    } catch (const ControlError& e) {
        return e.code();
    }
    FAIL("expected a ControlError");
    return ErrorCode::BadRequest;
}

SliceRegistry with_ues(SliceRegistry r) {
    r.attach(2836, 1);
    r.attach(2837, 1);
    r.attach(2838, 1);
    return r;
}

}  // namespace

TEST_SUITE("registry") {
    TEST_CASE("control and data slices are both accepted") {
        const auto r = fixtures::two_slices();
        REQUIRE(r.slices().size() == 2);
        CHECK(r.slices()[0].label == "s1");
        CHECK(r.slices()[1].dl_share == Share::from_ppm(950'000));
        CHECK(r.valid());
    }

    TEST_CASE("duplicate id rejected and registry unchanged") {
        auto r = fixtures::two_slices();
        const auto before = r;
        CHECK(error_of([&] { r.apply(SliceCommand::create(descriptor(1, 0.0, RbAvailability::Low))); }) ==
              ErrorCode::DuplicateSliceId);
        CHECK(r == before);
    }

    TEST_CASE("96 % next to 5 % exceeds the share sum") {
        auto r = fixtures::two_slices();
        const auto before = r;
        CHECK(error_of([&] { r.apply(SliceCommand::update(descriptor(2, 0.96, RbAvailability::Low))); }) ==
              ErrorCode::ShareSumExceeded);
        CHECK(r == before);
        // Uplink alone also counts.
        auto d = descriptor(2, 0.95, RbAvailability::Low);
        d.ul_share = Share::from_fraction(0.96);
        CHECK(error_of([&] { r.apply(SliceCommand::update(d)); }) == ErrorCode::ShareSumExceeded);
    }

    TEST_CASE("delete: unknown and non-empty slices") {
        auto r = with_ues(fixtures::two_slices());
        CHECK(error_of([&] { r.apply(SliceCommand::remove(7)); }) == ErrorCode::UnknownSliceId);
        CHECK(error_of([&] { r.apply(SliceCommand::remove(1)); }) == ErrorCode::SliceNonEmpty);
        r.apply(SliceCommand::remove(2));
        CHECK(r.slices().size() == 1);
    }

    TEST_CASE("descriptor checks") {
        SliceRegistry r;
        CHECK(error_of([&] { r.apply(SliceCommand::create(descriptor(0, 0.1, RbAvailability::Low))); }) ==
              ErrorCode::InvalidDescriptor);
        auto d = descriptor(3, 0.1, RbAvailability::Low);
        d.dl_share = Share::from_ppm(-1);
        CHECK(error_of([&] { r.apply(SliceCommand::create(d)); }) == ErrorCode::InvalidDescriptor);
    }

    TEST_CASE("relocation") {
        auto r = with_ues(fixtures::two_slices());
        r.apply(UeRelocation{2838, 2});
        CHECK(r.bindings().at(2838) == 2);
        const auto before = r;
        r.apply(UeRelocation{2838, 2});
        CHECK(r == before);
        CHECK(error_of([&] { r.apply(UeRelocation{9999, 2}); }) == ErrorCode::UnknownRnti);
        CHECK(error_of([&] { r.apply(UeRelocation{2838, 5}); }) == ErrorCode::UnknownSliceId);
    }

    TEST_CASE("unsliced registry refuses slice management") {
        auto r = SliceRegistry::unsliced(descriptor(radio::kUnslicedId, 1.0, RbAvailability::High));
        r.attach(2836, radio::kUnslicedId);
        CHECK(error_of([&] { r.apply(SliceCommand::create(descriptor(1, 0.1, RbAvailability::Low))); }) ==
              ErrorCode::SlicingDisabled);
        CHECK(error_of([&] { r.apply(UeRelocation{2836, 0}); }) == ErrorCode::SlicingDisabled);
    }

    TEST_CASE("HTTP status mapping") {
        CHECK(http_status(ErrorCode::DuplicateSliceId) == 400);
        CHECK(http_status(ErrorCode::InvalidDescriptor) == 400);
        CHECK(http_status(ErrorCode::UnknownSliceId) == 404);
        CHECK(http_status(ErrorCode::UnknownRnti) == 404);
        CHECK(http_status(ErrorCode::ShareSumExceeded) == 409);
        CHECK(http_status(ErrorCode::SliceNonEmpty) == 409);
    }

    TEST_CASE("property: random command streams keep the registry valid") {
        // Independent model: plain maps and integer sums.
        std::mt19937_64 rng(11);
        auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
        for (int run = 0; run < 200; ++run) {
            SliceRegistry r;
            std::map<SliceId, std::pair<std::int64_t, std::int64_t>> model;
            std::map<Rnti, SliceId> bound;
            for (int step = 0; step < 60; ++step) {
                const auto before = r;
                const int kind = pick(0, 3);
                const SliceId id = pick(1, 6);
                const auto dl = pick(0, 12) * 100'000LL, ul = pick(0, 12) * 100'000LL;
                auto d = descriptor(id, 0.0, RbAvailability::Low);
                d.dl_share = Share::from_ppm(dl);
                d.ul_share = Share::from_ppm(ul);
                ControlMessage m;
                bool expect_ok = false;
                auto sums_ok = [&](auto changed) {
                    std::int64_t sd = 0, su = 0;
                    for (auto [k, v] : changed) sd += v.first, su += v.second;
                    return sd <= 1'000'000 && su <= 1'000'000;
                };
                auto next = model;
                if (kind == 0) {
                    m = SliceCommand::create(d);
                    next[id] = {dl, ul};
                    expect_ok = !model.contains(id) && sums_ok(next);
                } else if (kind == 1) {
                    m = SliceCommand::update(d);
                    next[id] = {dl, ul};
                    expect_ok = model.contains(id) && sums_ok(next);
                } else if (kind == 2) {
                    m = SliceCommand::remove(id);
                    next.erase(id);
                    expect_ok = model.contains(id) &&
                                std::ranges::none_of(bound, [&](auto b) { return b.second == id; });
                } else {
                    const Rnti rnti = static_cast<Rnti>(pick(1, 3));
                    m = UeRelocation{rnti, id};
                    if (!bound.contains(rnti) && model.contains(id)) {
                        r.attach(rnti, id);
                        bound[rnti] = id;
                        continue;
                    }
                    expect_ok = bound.contains(rnti) && model.contains(id);
                }
                bool ok = true;
                try {
                    r.apply(m);
                } catch (const ControlError&) {
                    ok = false;
                }
                REQUIRE(ok == expect_ok);
                if (ok) {
                    if (kind <= 2) model = next;
                    else bound[std::get<UeRelocation>(m).rnti] = id;
                } else {
                    CHECK(r == before);
                }
                CHECK(r.valid());
                CHECK(r.slices().size() == model.size());
            }
        }
    }
}

TEST_SUITE("stats") {
    const SimTime tti = 1ms;

    TEST_CASE("5,000,000 bits over 1 s is 5 Mbps") {
        TelemetryBuffer buf(tti);
        for (int i = 0; i < 1000; ++i) {
            TtiRecord rec{static_cast<std::uint64_t>(i), i * tti, {}, {}};
            rec.ues.push_back({2838, 1, {5000, 0}, {0, 0}});
            buf.push(rec);
        }
        const auto r = report_stats(buf, 0s, 1s);
        REQUIRE(r.ue(2838));
        CHECK(r.ue(2838)->dl_throughput_bps() == doctest::Approx(5e6));
        CHECK(r.ue(2838)->ul_throughput_bps() == 0.0);
    }

    TEST_CASE("no deliveries: zero throughput and utilization") {
        TelemetryBuffer buf(tti);
        for (int i = 0; i < 100; ++i) {
            TtiRecord rec{static_cast<std::uint64_t>(i), i * tti, {}, {}};
            rec.ues.push_back({1, 1, {0, 0}, {0, 0}});
            rec.slices.push_back({1, {0, 0}, {0, 0}});
            buf.push(rec);
        }
        const auto r = report_stats(buf, 0s, 100ms);
        CHECK(r.ue(1)->dl_throughput_bps() == 0.0);
        CHECK(r.slice(1)->utilization(radio::Direction::Downlink) == 0.0);
    }

    TEST_CASE("empty or inverted window is an error") {
        TelemetryBuffer buf(tti);
        CHECK_THROWS_AS(report_stats(buf, 1s, 1s), std::invalid_argument);
        CHECK_THROWS_AS(report_stats(buf, 2s, 1s), std::invalid_argument);
    }

    TEST_CASE("saturated data slice in an allocator trace uses its whole quota") {
        const auto cell = radio::make_cell(10'000'000, 15'000);
        auto reg = fixtures::two_slices();
        std::vector<radio::UeContext> ues(2);
        ues[0].rnti = 10;
        ues[0].slice_id = 2;
        ues[1].rnti = 11;
        ues[1].slice_id = 1;
        ues[1].dl_queue_bytes = 0;
        radio::SchedulerState st;
        TelemetryBuffer buf(tti);
        for (std::uint64_t t = 0; t < 1000; ++t) {
            ues[0].dl_queue_bytes = 1'000'000;
            const auto a = radio::allocate_tti(cell, reg.slices(), ues, st, t, radio::Direction::Downlink);
            TtiRecord rec{t, static_cast<std::int64_t>(t) * tti, {}, {}};
            for (const auto& d : reg.slices()) {
                SliceTtiRecord s{d.slice_id, {a.quotas.at(d.slice_id), 0}, {0, 0}};
                for (const auto& g : a.grants) s.granted_prbs[0] += g.slice_id == d.slice_id;
                rec.slices.push_back(s);
            }
            buf.push(rec);
        }
        const auto r = report_stats(buf, 0s, 1s);
        // Slice 2 also borrows slice 1's idle PRBs; only quota PRBs count.
        CHECK(r.slice(2)->granted_prbs[0] == 50'000);
        CHECK(r.slice(2)->quota_prbs[0] == 47'500);
        CHECK(r.slice(2)->utilization(radio::Direction::Downlink) == 1.0);
        CHECK(r.slice(1)->utilization(radio::Direction::Downlink) == 0.0);
    }

    TEST_CASE("merging adjacent windows equals one report over their union") {
        std::mt19937_64 rng(5);
        TelemetryBuffer buf(tti);
        for (int i = 0; i < 1000; ++i) {
            TtiRecord rec{static_cast<std::uint64_t>(i), i * tti, {}, {}};
            for (Rnti u = 1; u <= 3; ++u) {
                rec.ues.push_back({u, 1, {static_cast<std::int64_t>(rng() % 5000), static_cast<std::int64_t>(rng() % 900)},
                                   {static_cast<std::int64_t>(rng() % 100), 0}});
            }
            const int q = static_cast<int>(rng() % 10);
            rec.slices.push_back({1, {q, q}, {static_cast<std::int64_t>(rng() % 12), static_cast<std::int64_t>(rng() % 3)}});
            buf.push(rec);
        }
        std::vector<StatsReport> parts;
        for (int p = 0; p < 10; ++p) parts.push_back(report_stats(buf, p * 100ms, (p + 1) * 100ms));
        const auto whole = report_stats(buf, 0s, 1s);
        const auto merged = merge(parts);
        CHECK(merged.window_start == whole.window_start);
        CHECK(merged.window_end == whole.window_end);
        for (const auto& u : whole.ues) {
            CHECK(merged.ue(u.rnti)->delivered_bits == u.delivered_bits);
            CHECK(merged.ue(u.rnti)->dl_throughput_bps() == doctest::Approx(u.dl_throughput_bps()));
            CHECK(merged.ue(u.rnti)->queue_bytes == u.queue_bytes);
        }
        CHECK(merged.slice(1)->used_prbs == whole.slice(1)->used_prbs);
        CHECK(merged.slice(1)->quota_prbs == whole.slice(1)->quota_prbs);
        for (auto d : radio::kDirections) {
            CHECK(whole.slice(1)->utilization(d) >= 0.0);
            CHECK(whole.slice(1)->utilization(d) <= 1.0);
        }
    }
}

TEST_SUITE("autoscale") {
    AutoscalePolicy enabled() {
        AutoscalePolicy p;
        p.enabled = true;
        return p;
    }

    TEST_CASE("busy control slice takes 5 points from the idle data slice") {
        const auto reg = fixtures::two_slices();
        const auto cmds = autoscale_step(enabled(), fixtures::synthetic_report(0, 1, {{1, 0.98}, {2, 0.10}}), reg);
        REQUIRE(cmds.size() == 2);
        auto after = reg;
        for (const auto& c : cmds) after.apply(c);
        CHECK(after.find(1)->dl_share == Share::from_fraction(0.10));
        CHECK(after.find(1)->ul_share == Share::from_fraction(0.10));
        CHECK(after.find(2)->dl_share == Share::from_fraction(0.90));
        CHECK(after.find(2)->ul_share == Share::from_fraction(0.90));
    }

    TEST_CASE("dead band, disabled policy and donor floor emit nothing") {
        const auto reg = fixtures::two_slices();
        CHECK(autoscale_step(enabled(), fixtures::synthetic_report(0, 1, {{1, 0.7}, {2, 0.7}}), reg).empty());
        CHECK(autoscale_step({}, fixtures::synthetic_report(0, 1, {{1, 0.98}, {2, 0.1}}), reg).empty());
        SliceRegistry floor;
        floor.apply(SliceCommand::create(descriptor(1, 0.5, RbAvailability::High)));
        floor.apply(SliceCommand::create(descriptor(2, 0.02, RbAvailability::Low)));
        CHECK(autoscale_step(enabled(), fixtures::synthetic_report(0, 1, {{1, 0.98}, {2, 0.1}}), floor).empty());
    }

    TEST_CASE("one shift per cooldown under persistent imbalance") {
        auto reg = fixtures::two_slices();
        Autoscaler scaler(enabled());
        std::vector<double> shifts;
        for (int p = 0; p < 300; ++p) {
            const auto cmds = scaler.on_report(
                fixtures::synthetic_report(p * 0.1, (p + 1) * 0.1, {{1, 0.98}, {2, 0.10}}), reg);
            if (cmds.empty()) continue;
            for (const auto& c : cmds) reg.apply(c);
            shifts.push_back((p + 1) * 0.1);
        }
        REQUIRE(shifts.size() == 6);
        for (std::size_t i = 0; i < shifts.size(); ++i) CHECK(shifts[i] == doctest::Approx(1.0 + 5.0 * i));
        CHECK(reg.find(1)->dl_share == Share::from_fraction(0.35));
        CHECK(reg.find(2)->dl_share == Share::from_fraction(0.65));
    }

    TEST_CASE("property: random stats sequences never break the registry") {
        const auto audit = fixtures::audit_autoscale(500, 99);
        for (const auto& f : audit.failures) INFO(f);
        CHECK(audit.failures.empty());
        CHECK(audit.shifts > 100);
    }

    TEST_CASE("policy validation") {
        AutoscalePolicy p;
        p.low_watermark = 0.95;
        CHECK_THROWS(p.validate());
        p = {};
        p.step = 0.0;
        CHECK_THROWS(p.validate());
    }
}

TEST_SUITE("codec") {
    TEST_CASE("descriptor round trip") {
        const auto d = descriptor(2, 0.95, RbAvailability::Low, 1);
        CHECK(descriptor_from_json(to_json(d)) == d);
        const auto j = json::parse(R"({"slice_id": 4, "share": 0.25, "rb_availability": "high"})");
        const auto e = descriptor_from_json(j);
        CHECK(e.dl_share == Share::from_ppm(250'000));
        CHECK(e.ul_share == e.dl_share);
        CHECK(e.rb_availability == RbAvailability::High);
    }

    TEST_CASE("malformed bodies") {
        CHECK(error_of([] { descriptor_from_json(json::parse(R"({"share": 0.2})")); }) == ErrorCode::InvalidDescriptor);
        CHECK(error_of([] { descriptor_from_json(json::parse(R"({"slice_id": 1, "share": 1.5})")); }) ==
              ErrorCode::InvalidDescriptor);
        CHECK(error_of([] { descriptor_from_json(json::parse(R"({"slice_id": 1, "share": "x"})")); }) ==
              ErrorCode::InvalidDescriptor);
        CHECK(error_of([] { message_from_json(json::parse(R"({"type": "reboot"})")); }) == ErrorCode::BadRequest);
    }

    TEST_CASE("patch keeps unspecified fields") {
        const auto d = merge_patch(descriptor(2, 0.95, RbAvailability::Low, 1), json::parse(R"({"dl_share": 0.5})"));
        CHECK(d.dl_share == Share::from_fraction(0.5));
        CHECK(d.ul_share == Share::from_fraction(0.95));
        CHECK(d.priority == 1);
        CHECK_THROWS_AS(merge_patch(d, json::parse(R"({"slice_id": 3})")), ControlError);
    }

    TEST_CASE("southbound messages round trip") {
        const std::vector<ControlMessage> msgs = {SliceCommand::create(descriptor(3, 0.1, RbAvailability::High)),
                                                  SliceCommand::update(descriptor(3, 0.2, RbAvailability::Low)),
                                                  SliceCommand::remove(3), UeRelocation{2838, 2}};
        for (const auto& m : msgs) CHECK(to_json(message_from_json(to_json(m))) == to_json(m));
        CHECK(to_json(msgs[3]) == json::parse(R"({"type": "relocate_ue", "rnti": 2838, "slice_id": 2})"));
    }
}

TEST_SUITE("control plane") {
    ControlPlane plane() { return ControlPlane(with_ues(fixtures::two_slices()), 100ms); }

    Agent agent() {
        std::vector<radio::UeContext> ues(3);
        ues[0].rnti = 2836;
        ues[1].rnti = 2837;
        ues[2].rnti = 2838;
        return Agent(radio::make_cell(10'000'000, 15'000), with_ues(fixtures::two_slices()), ues, {});
    }

    TEST_CASE("queued relocation is visible to the allocation of the same TTI") {
        auto cp = plane();
        auto ag = agent();
        cp.submit(UeRelocation{2838, 2});
        CHECK(ag.registry().bindings().at(2838) == 1);
        CHECK(southbound_exchange(cp, ag, 7) == 1);
        ag.ues()[2].dl_queue_bytes = 100'000;
        const auto a = radio::allocate_tti(ag.cell(), ag.slices(), ag.ues(), ag.scheduler(), 7,
                                           radio::Direction::Downlink);
        REQUIRE(!a.grants.empty());
        for (const auto& g : a.grants) CHECK(g.slice_id == 2);
        CHECK(cp.snapshot()->ues[2].slice_id == 2);
        CHECK(cp.registry() == ag.registry());
    }

    TEST_CASE("conflicting updates in one TTI: last writer wins") {
        auto cp = plane();
        auto ag = agent();
        cp.submit(SliceCommand::update(descriptor(2, 0.5, RbAvailability::Low)));
        cp.submit(SliceCommand::update(descriptor(2, 0.7, RbAvailability::Low)));
        southbound_exchange(cp, ag, 1);
        CHECK(ag.registry().find(2)->dl_share == Share::from_fraction(0.7));
    }

    TEST_CASE("ingress validation sees queued commands") {
        auto cp = plane();
        cp.submit(SliceCommand::update(descriptor(2, 0.5, RbAvailability::Low)));
        cp.submit(SliceCommand::create(descriptor(3, 0.45, RbAvailability::Low)));
        CHECK(error_of([&] { cp.submit(SliceCommand::create(descriptor(4, 0.01, RbAvailability::Low))); }) ==
              ErrorCode::ShareSumExceeded);
        CHECK(error_of([&] { cp.submit(SliceCommand::create(descriptor(3, 0.0, RbAvailability::Low))); }) ==
              ErrorCode::DuplicateSliceId);
        CHECK(cp.drain(0).size() == 2);
        CHECK(cp.rejected().empty());
    }

    TEST_CASE("share changes restart deficit accounts") {
        auto cp = plane();
        auto ag = agent();
        ag.scheduler().deficits().set_carryover_micro(2, radio::Direction::Downlink, 400'000);
        cp.submit(UeRelocation{2838, 2});
        southbound_exchange(cp, ag, 1);
        CHECK(ag.scheduler().deficits().carryover_micro(2, radio::Direction::Downlink) == 400'000);
        cp.submit(SliceCommand::update(descriptor(2, 0.9, RbAvailability::Low)));
        southbound_exchange(cp, ag, 2);
        CHECK(ag.scheduler().deficits().carryover_micro(2, radio::Direction::Downlink) == 0);
    }

    TEST_CASE("agent refuses messages that do not apply") {
        auto ag = agent();
        CHECK_THROWS_AS(ag.apply(json::parse(R"({"type": "delete_slice", "slice_id": 1})")), InvariantViolation);
    }

    TEST_CASE("command log replays into the same registry") {
        auto live = plane();
        live.submit(SliceCommand::update(descriptor(2, 0.8, RbAvailability::Low)));
        live.drain(3);
        live.submit(UeRelocation{2838, 2});
        live.submit(UeRelocation{2837, 2});
        live.drain(9);
        const auto log = live.command_log();
        REQUIRE(log.size() == 3);
        CHECK(log[0].tti == 3);
        CHECK(log[2].tti == 9);

        auto replay = plane();
        replay.schedule_replay(log);
        for (std::uint64_t t = 0; t < 12; ++t) {
            const auto n = replay.drain(t).size();
            CHECK(n == (t == 3 ? 1u : t == 9 ? 2u : 0u));
        }
        CHECK(replay.registry() == live.registry());
        CHECK(replay.command_log().size() == 3);
    }

    TEST_CASE("stats windows merge the latest periods") {
        auto cp = plane();
        CHECK(error_of([&] { cp.stats(1s); }) == ErrorCode::BadRequest);
        for (int p = 0; p < 20; ++p) {
            StatsReport r;
            r.window_start = p * 0.1;
            r.window_end = (p + 1) * 0.1;
            UeStats u;
            u.rnti = 2838;
            u.slice_id = 1;
            u.delivered_bits = {p < 10 ? 100'000 : 500'000, 0};
            r.ues.push_back(u);
            cp.publish(r, {}, static_cast<std::uint64_t>(p * 100));
        }
        const auto last = cp.stats(1s);
        CHECK(last.window_start == doctest::Approx(1.0));
        CHECK(last.ue(2838)->dl_throughput_bps() == doctest::Approx(5e6));
        CHECK(cp.stats(100ms).window_start == doctest::Approx(1.9));
        CHECK(cp.stats(60s).window_start == doctest::Approx(0.0));
        CHECK(error_of([&] { cp.stats(0s); }) == ErrorCode::BadRequest);
    }

    TEST_CASE("telemetry frames follow publications") {
        auto cp = plane();
        std::uint64_t seen = 0;
        CHECK_FALSE(cp.wait_frame(seen, 1ms).has_value());
        StatsReport r;
        r.window_end = 0.1;
        UeStats u;
        u.rnti = 2838;
        u.slice_id = 1;
        u.throughput_bps = {1.7e6, 0.0};
        r.ues.push_back(u);
        cp.publish(r, {}, 100);
        const auto frame = cp.wait_frame(seen, 1ms);
        REQUIRE(frame);
        const auto j = json::parse(*frame);
        CHECK(j["t"] == 0.1);
        CHECK(j["per_ue"][0]["dl_mbps"] == doctest::Approx(1.7));
        CHECK(j["per_ue"][0]["slice_id"] == 1);
        CHECK(j["per_slice"].size() == 2);
        CHECK_FALSE(cp.wait_frame(seen, 1ms).has_value());
    }

    TEST_CASE("autoscale commands reach the agent through the internal queue") {
        AutoscalePolicy pol;
        pol.enabled = true;
        ControlPlane cp(with_ues(fixtures::two_slices()), 100ms, pol);
        auto ag = agent();
        for (int p = 0; p < 10; ++p) {
            cp.publish(fixtures::synthetic_report(p * 0.1, (p + 1) * 0.1, {{1, 0.98}, {2, 0.1}}), {}, 0);
        }
        CHECK(southbound_exchange(cp, ag, 1000) == 2);
        CHECK(ag.registry().find(1)->dl_share == Share::from_fraction(0.1));
        CHECK(cp.command_log().empty());
    }

    TEST_CASE("relocation is lossless when both slices have room") {
        // Same traffic with and without a mid-run relocation: every byte is
        // served either way.
        auto run = [](bool relocate) {
            auto cp = plane();
            auto ag = agent();
            std::int64_t served = 0;
            for (std::uint64_t t = 0; t < 2000; ++t) {
                if (relocate && t == 1000) cp.submit(UeRelocation{2838, 2});
                southbound_exchange(cp, ag, t);
                ag.ues()[2].dl_queue_bytes += 150;
                const auto before = ag.ues()[2].dl_queue_bytes;
                radio::allocate_tti(ag.cell(), ag.slices(), ag.ues(), ag.scheduler(), t, radio::Direction::Downlink);
                served += before - ag.ues()[2].dl_queue_bytes;
            }
            return std::pair{served, ag.ues()[2].dl_queue_bytes};
        };
        const auto [a, qa] = run(false);
        const auto [b, qb] = run(true);
        CHECK(a == 300'000);
        CHECK(b == a);
        CHECK(qa == 0);
        CHECK(qb == 0);
    }
}
