#include <cmath>

#include "doctest.h"
#include "slicesim/apps/event_source.hpp"
#include "slicesim/apps/video.hpp"
#include "slicesim/common/error.hpp"

using namespace slicesim;
using namespace slicesim::apps;
using namespace std::chrono_literals;

TEST_SUITE("event source") {
    TEST_CASE("scripted emissions fire at their instants") {
        EventSourceConfig cfg;
        cfg.mode = EventSourceConfig::Mode::Scripted;
        cfg.times_s = {1.0, 2.0};
        EventSource src(cfg, RngStream(1, "operator"));
        CHECK(src.step(999ms).empty());
        const auto first = src.step(1s);
        REQUIRE(first.size() == 1);
        CHECK(first[0].created == 1s);
        CHECK(first[0].seq == 1);
        const auto rest = src.step(10s);
        REQUIRE(rest.size() == 1);
        CHECK(rest[0].created == 2s);
        CHECK_FALSE(src.next_emission().has_value());
    }

    TEST_CASE("Poisson at 2 Hz over 1000 s emits 2000 +- 150 commands") {
        EventSourceConfig cfg;
        cfg.rate_hz = 2.0;
        EventSource src(cfg, RngStream(42, "operator"));
        const auto all = src.step(1000s);
        CHECK(all.size() >= 1850);
        CHECK(all.size() <= 2150);
        for (std::size_t i = 1; i < all.size(); ++i) {
            CHECK(all[i].created >= all[i - 1].created);
            CHECK(all[i].seq == all[i - 1].seq + 1);
        }
    }

    TEST_CASE("same seed, same emission times") {
        EventSourceConfig cfg;
        EventSource a(cfg, RngStream(7, "operator"));
        EventSource b(cfg, RngStream(7, "operator"));
        const auto x = a.step(200s), y = b.step(200s);
        REQUIRE(x.size() == y.size());
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i].created == y[i].created);
    }

    TEST_CASE("deadline check") {
        const OperatorCommand c{1, 100ms};
        const auto on_time = event_latency_record(c, 112ms, 50ms);
        CHECK(on_time.latency == 12ms);
        CHECK(on_time.deadline_met);
        const auto late = event_latency_record(c, 151ms, 50ms);
        CHECK_FALSE(late.deadline_met);
        CHECK(event_latency_record(c, 150ms, 50ms).deadline_met);
    }

    TEST_CASE("command encoding pads to the configured size") {
        const OperatorCommand c{77, 1234567us};
        const auto wire = encode(c, 64);
        CHECK(wire.size() == 64);
        const auto back = decode_operator_command(wire);
        CHECK(back.seq == 77);
        CHECK(back.created == c.created);
    }

    TEST_CASE("invalid configuration rejected") {
        EventSourceConfig cfg;
        cfg.rate_hz = 0.0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = {};
        cfg.mode = EventSourceConfig::Mode::Scripted;
        cfg.times_s = {2.0, 1.0};
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}

TEST_SUITE("video") {
    namespace {
    // Runs a session with a constant delivery rate in 1 ms steps.
    struct ConstantFeed {
        VideoSession s;
        double carry = 0.0;
        double rate_bps;

        void run(double seconds) {
            const int steps = static_cast<int>(std::lround(seconds * 1000));
            for (int i = 0; i < steps; ++i) {
                carry += rate_bps / 8.0 * 0.001;
                const auto bytes = static_cast<std::int64_t>(carry);
                carry -= static_cast<double>(bytes);
                s = video_step(s, bytes, 0.001);
            }
        }
    };
    }  // namespace

    TEST_CASE("segment interval follows from bitrate and segment size") {
        CHECK(VideoConfig{}.segment_interval() == 100ms);
        VideoServer server{VideoConfig{}};
        const auto seg = server.next_segment();
        std::int64_t total = 0;
        for (auto p : seg) {
            CHECK(p <= 1500);
            total += p;
        }
        CHECK(total == 62'500);
        CHECK(seg.size() == 42);
    }

    TEST_CASE("playback starts once the initial buffer fills") {
        ConstantFeed f{VideoSession::start({}), 0.0, 5e6};
        f.run(1.999);
        CHECK(f.s.state == PlayoutState::Buffering);
        f.run(0.002);
        CHECK(f.s.state == PlayoutState::Playing);
    }

    TEST_CASE("delivery at the bitrate never stalls") {
        ConstantFeed f{VideoSession::start({}), 0.0, 5e6};
        f.run(60.0);
        CHECK(f.s.stall_count == 0);
        CHECK(f.s.state == PlayoutState::Playing);
    }

    TEST_CASE("1.8 Mbps feed stalls when the head start runs out") {
        // After start the buffer drains at 1 - 1.8/5 = 0.64 s per second,
        // so the 2 s head start lasts 3.125 s.
        ConstantFeed f{VideoSession::start({}), 0.0, 1.8e6};
        double t = 0.0, started = -1.0, stalled = -1.0;
        while (t < 20.0 && stalled < 0.0) {
            f.run(0.001);
            t += 0.001;
            if (started < 0.0 && f.s.state == PlayoutState::Playing) started = t;
            if (f.s.state == PlayoutState::Stalled) stalled = t;
        }
        REQUIRE(started > 0.0);
        CHECK(started == doctest::Approx(2.0 * 5.0 / 1.8).epsilon(0.002));
        CHECK(stalled - started == doctest::Approx(3.125).epsilon(0.002));
        CHECK(f.s.stall_count == 1);
        // Resume needs 1 s of media: 5/1.8 s of wall time at this rate.
        double resumed = -1.0;
        while (t < 30.0 && resumed < 0.0) {
            f.run(0.001);
            t += 0.001;
            if (f.s.state == PlayoutState::Playing) resumed = t;
        }
        CHECK(resumed - stalled == doctest::Approx(5.0 / 1.8).epsilon(0.002));
        CHECK(f.s.total_stall_duration_s == doctest::Approx(5.0 / 1.8).epsilon(0.002));
    }

    TEST_CASE("property: flow balance and monotone stall counters") {
        RngStream rng(3, "video-property");
        VideoSession s = VideoSession::start({});
        int stalls = 0;
        double stall_time = 0.0;
        for (int i = 0; i < 20'000; ++i) {
            const auto bytes = static_cast<std::int64_t>(rng.uniform() * 1300.0);
            s = video_step(s, bytes, 0.001);
            CHECK(s.buffer_s >= 0.0);
            CHECK(s.stall_count >= stalls);
            CHECK(s.total_stall_duration_s >= stall_time);
            stalls = s.stall_count;
            stall_time = s.total_stall_duration_s;
            const double received_s = static_cast<double>(s.delivered_bytes) * 8.0 / s.bitrate_bps;
            CHECK(s.buffer_s + s.played_s == doctest::Approx(received_s).epsilon(1e-9));
        }
    }

    TEST_CASE("invalid configuration rejected") {
        VideoConfig cfg;
        cfg.bitrate_bps = 0.0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = {};
        cfg.packet_size_bytes = 0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}
