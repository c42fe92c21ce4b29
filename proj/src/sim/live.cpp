#include "slicesim/sim/live.hpp"

#include <chrono>

#include "slicesim/common/error.hpp"

namespace slicesim::sim {

namespace {

double checked_pace(double pace) {
    if (!(pace > 0.0)) throw ConfigError("pace must be positive");
    return pace;
}

}  // namespace

LiveSession::LiveSession(ScenarioConfig cfg, double pace) : pace_(checked_pace(pace)), engine_(std::move(cfg)) {}

LiveSession::~LiveSession() {
    stop();
    {
        std::unique_lock lock(mu_);
        if (!started_) {
            started_ = true;
            done_ = true;
        }
    }
    if (thread_.joinable()) thread_.join();
    if (server_) server_->stop();
}

int LiveSession::serve(const std::string& host, int port) {
    server_ = std::make_unique<control::NorthboundServer>(
        engine_.control_plane(), control::ScenarioHooks{[this] { start(); }, [this] { stop(); }});
    return server_->start(host, port);
}

void LiveSession::start() {
    std::lock_guard lock(mu_);
    if (started_) return;
    started_ = true;
    thread_ = std::thread([this] { run(); });
}

void LiveSession::stop() { engine_.request_stop(); }

bool LiveSession::started() const {
    std::lock_guard lock(mu_);
    return started_;
}

bool LiveSession::done() const {
    std::lock_guard lock(mu_);
    return done_ && report_.has_value();
}

void LiveSession::run() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const auto tti = engine_.config().cell.tti;
    // Ten TTIs per wake-up keeps pacing error well under the stats period.
    constexpr std::uint64_t kChunk = 10;
    while (!engine_.finished()) {
        const auto target = engine_.next_tti() + kChunk;
        engine_.step_until(target);
        const auto sim = std::chrono::duration<double>(to_seconds(static_cast<std::int64_t>(target) * tti) / pace_);
        std::this_thread::sleep_until(t0 + std::chrono::duration_cast<clock::duration>(sim));
    }
    auto rep = engine_.finish();
    engine_.control_plane().close();
    std::lock_guard lock(mu_);
    report_ = std::move(rep);
    done_ = true;
    cv_.notify_all();
}

Report LiveSession::wait() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return done_; });
    if (!report_) throw std::logic_error("live session ended before it started");
    return *report_;
}

Report replay(const ScenarioConfig& cfg, const CommandLog& log, EngineHooks hooks) {
    Engine e(cfg, std::move(hooks));
    e.control_plane().schedule_replay(log.commands);
    if (log.stopped_at_tti) e.stop_at(*log.stopped_at_tti);
    return e.run();
}

}  // namespace slicesim::sim
