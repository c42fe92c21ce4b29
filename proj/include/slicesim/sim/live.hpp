#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "slicesim/control/northbound.hpp"
#include "slicesim/sim/engine.hpp"

namespace slicesim::sim {

/// A scenario run paced against the wall clock with the northbound API open.
///
/// Simulated time advances `pace` times faster than real time. Commands
/// arriving over REST take effect at the next TTI boundary and are recorded
/// with that TTI, so replay() of the command log reproduces the run.
class LiveSession {
public:
    /// Throws ConfigError unless pace > 0.
    LiveSession(ScenarioConfig cfg, double pace);
    ~LiveSession();

    LiveSession(const LiveSession&) = delete;
    LiveSession& operator=(const LiveSession&) = delete;

    /// Serves the REST API; returns the bound port.
    int serve(const std::string& host, int port);

    /// Starts simulated time; later calls do nothing.
    void start();
    /// Ends the run at the next TTI boundary.
    void stop();
    bool started() const;
    /// True once the run has ended and the report is available.
    bool done() const;

    /// Blocks until the run ends, then closes the telemetry stream.
    Report wait();

    control::ControlPlane& control_plane() { return engine_.control_plane(); }
    Engine& engine() { return engine_; }

private:
    void run();

    double pace_;
    Engine engine_;
    std::unique_ptr<control::NorthboundServer> server_;
    std::thread thread_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    bool started_ = false;
    bool done_ = false;
    std::optional<Report> report_;
};

/// Reruns a scenario in batch mode with a recorded command log.
Report replay(const ScenarioConfig& cfg, const CommandLog& log, EngineHooks hooks = {});

}  // namespace slicesim::sim
