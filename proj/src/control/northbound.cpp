#include "slicesim/control/northbound.hpp"

#include <charconv>
#include <stdexcept>

#include "httplib.h"

namespace slicesim::control {

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const ControlError& e) {
    send_json(res, http_status(e.code()), {{"error", to_string(e.code())}, {"message", e.what()}});
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::parse_error&) {
        throw ControlError(ErrorCode::BadRequest, "request body is not valid JSON");
    }
}

template <typename T>
T path_number(const std::string& text, ErrorCode not_found) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ControlError(not_found, "no such id " + text);
    }
    return value;
}

/// Runs `fn`, mapping ControlError to its HTTP status.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const ControlError& e) {
            send_error(res, e);
        }
    };
}

}  // namespace

NorthboundServer::NorthboundServer(ControlPlane& plane, ScenarioHooks hooks)
    : plane_(plane), hooks_(std::move(hooks)), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

NorthboundServer::~NorthboundServer() { stop(); }

void NorthboundServer::install_routes() {
    auto& s = *server_;
    // Address reuse only: a second server on a busy port must fail to bind.
    s.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, PATCH, DELETE, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
    s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    s.Get("/slices", [this](const httplib::Request&, httplib::Response& res) {
        json out = json::array();
        for (const auto& d : plane_.snapshot()->slices) out.push_back(to_json(d));
        send_json(res, 200, out);
    });

    s.Post("/slices", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto d = descriptor_from_json(parse_body(req));
        plane_.submit(SliceCommand::create(d));
        send_json(res, 200, {{"status", "queued"}, {"slice", to_json(d)}});
    }));

    s.Patch(R"(/slices/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto id = path_number<SliceId>(req.matches[1], ErrorCode::UnknownSliceId);
        const auto d = plane_.submit_patch(id, parse_body(req));
        send_json(res, 200, {{"status", "queued"}, {"slice", to_json(d)}});
    }));

    s.Delete(R"(/slices/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto id = path_number<SliceId>(req.matches[1], ErrorCode::UnknownSliceId);
        plane_.submit(SliceCommand::remove(id));
        send_json(res, 200, {{"status", "queued"}, {"slice_id", id}});
    }));

    s.Get("/ues", [this](const httplib::Request&, httplib::Response& res) {
        json out = json::array();
        for (const auto& ue : plane_.snapshot()->ues) out.push_back(to_json(ue));
        send_json(res, 200, out);
    });

    s.Post(R"(/ues/(\d+)/slice)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto rnti = path_number<Rnti>(req.matches[1], ErrorCode::UnknownRnti);
        const auto body = parse_body(req);
        if (!body.is_object() || !body.contains("slice_id") || !body.at("slice_id").is_number_integer()) {
            throw ControlError(ErrorCode::BadRequest, "body must be {\"slice_id\": <int>}");
        }
        const auto slice = body.at("slice_id").get<SliceId>();
        plane_.submit(UeRelocation{rnti, slice});
        send_json(res, 200, {{"status", "queued"}, {"rnti", rnti}, {"slice_id", slice}});
    }));

    s.Get("/stats", guarded([this](const httplib::Request& req, httplib::Response& res) {
        SimTime window = plane_.stats_period();
        if (req.has_param("window")) {
            try {
                window = parse_duration(req.get_param_value("window"));
            } catch (const std::invalid_argument& e) {
                throw ControlError(ErrorCode::BadRequest, e.what());
            }
        }
        send_json(res, 200, to_json(plane_.stats(window)));
    }));

    s.Get("/telemetry", [this](const httplib::Request&, httplib::Response& res) {
        auto seen = std::make_shared<std::uint64_t>(0);
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream", [this, seen](std::size_t, httplib::DataSink& sink) {
                if (stopping_ || plane_.closed()) {
                    sink.done();
                    return false;
                }
                const auto frame = plane_.wait_frame(*seen, std::chrono::milliseconds(250));
                const std::string chunk = frame ? "data: " + *frame + "\n\n" : ": keepalive\n\n";
                return sink.write(chunk.data(), chunk.size());
            });
    });

    auto hook = [](const std::function<void()>& fn) {
        return [&fn](const httplib::Request&, httplib::Response& res) {
            if (!fn) {
                send_json(res, 404, {{"error", "NotLive"}, {"message", "no live scenario to control"}});
                return;
            }
            fn();
            send_json(res, 200, {{"status", "ok"}});
        };
    };
    s.Post("/scenario/start", hook(hooks_.start));
    s.Post("/scenario/stop", hook(hooks_.stop));
}

int NorthboundServer::start(const std::string& host, int port) {
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return bound;
}

void NorthboundServer::stop() {
    stopping_ = true;
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace slicesim::control
