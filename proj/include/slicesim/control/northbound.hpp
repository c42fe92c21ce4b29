#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <thread>

#include "slicesim/control/control_plane.hpp"

namespace httplib {
class Server;
}

namespace slicesim::control {

/// Live-mode scenario controls. Unset hooks answer 404.
struct ScenarioHooks {
    std::function<void()> start;
    std::function<void()> stop;
};

/// REST front end of a ControlPlane, including the /telemetry event stream.
class NorthboundServer {
public:
    explicit NorthboundServer(ControlPlane& plane, ScenarioHooks hooks = {});
    ~NorthboundServer();

    NorthboundServer(const NorthboundServer&) = delete;
    NorthboundServer& operator=(const NorthboundServer&) = delete;

    /// Binds and serves from a background thread; port 0 picks a free port.
    /// Returns the bound port. Throws std::runtime_error if binding fails.
    int start(const std::string& host, int port);
    void stop();

private:
    void install_routes();

    ControlPlane& plane_;
    ScenarioHooks hooks_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    std::atomic<bool> stopping_{false};
};

}  // namespace slicesim::control
