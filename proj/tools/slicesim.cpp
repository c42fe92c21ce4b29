#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "slicesim/common/error.hpp"
#include "slicesim/sim/compare.hpp"
#include "slicesim/sim/engine.hpp"
#include "slicesim/sim/live.hpp"
#include "slicesim/sim/presets.hpp"

namespace {

using namespace slicesim;
using nlohmann::json;

constexpr int kConfigExit = 2;
constexpr int kInvariantExit = 3;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

void print_summary(const sim::Report& r) {
    const auto s = sim::to_json(r).at("summary");
    std::cerr << "ran " << r.ttis << " TTIs (" << r.duration_s << " s)\n";
    for (const auto& [k, v] : s.items()) std::cerr << "  " << k << ": " << v.dump() << "\n";
}

void emit(const sim::Report& r, const std::string& out, const std::string& csv) {
    write_text(out, sim::canonical(r));
    if (!csv.empty()) sim::write_csv(r, csv);
    print_summary(r);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network-slicing simulator for cloud-robotics traffic"};
    app.set_version_flag("--version", std::string(sim::kVersion));
    app.require_subcommand(1);

    std::string config, out = "-", csv, commands, listen = "127.0.0.1:8080", commands_out;
    std::string report_a, report_b;
    double pace = 1.0;
    bool autostart = false;

    auto* run = app.add_subcommand("run", "Run a scenario in batch mode");
    run->add_option("-c,--config", config, "Scenario file or preset:<name>")->required();
    run->add_option("-o,--out", out, "Report path ('-' for stdout)");
    run->add_option("--csv", csv, "Directory for CSV exports");

    auto* cmp = app.add_subcommand("compare", "Compare two reports");
    cmp->add_option("a", report_a, "Reference report")->required();
    cmp->add_option("b", report_b, "Candidate report")->required();

    auto* serve = app.add_subcommand("serve", "Run a scenario live with the REST API");
    serve->add_option("-c,--config", config, "Scenario file or preset:<name>")->required();
    serve->add_option("-l,--listen", listen, "host:port to bind");
    serve->add_option("--pace", pace, "Simulated seconds per wall-clock second");
    serve->add_flag("--autostart", autostart, "Start without waiting for POST /scenario/start");
    serve->add_option("-o,--out", out, "Report path ('-' for stdout)");
    serve->add_option("--commands-out", commands_out, "Where to save the command log");
    serve->add_option("--csv", csv, "Directory for CSV exports");

    auto* rep = app.add_subcommand("replay", "Rerun a live session from its command log");
    rep->add_option("-c,--config", config, "Scenario file or preset:<name>")->required();
    rep->add_option("--commands", commands, "Command log saved by serve")->required();
    rep->add_option("-o,--out", out, "Report path ('-' for stdout)");
    rep->add_option("--csv", csv, "Directory for CSV exports");

    auto* presets = app.add_subcommand("presets", "List or print built-in scenarios");
    presets->require_subcommand(1);
    presets->add_subcommand("list", "Preset names");
    std::string preset_name;
    auto* show = presets->add_subcommand("show", "Print a preset as a scenario file");
    show->add_option("name", preset_name)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            emit(sim::run_scenario(sim::load_scenario(config)), out, csv);
        } else if (*cmp) {
            std::cout << sim::compare_runs(read_json(report_a), read_json(report_b)).dump(2) << "\n";
        } else if (*serve) {
            const auto colon = listen.rfind(':');
            if (colon == std::string::npos) throw ConfigError("--listen must be host:port");
            int port = 0;
            try {
                port = std::stoi(listen.substr(colon + 1));
            } catch (const std::exception&) {
                throw ConfigError("bad port in --listen: " + listen);
            }
            sim::LiveSession session(sim::load_scenario(config), pace);
            const int bound = session.serve(listen.substr(0, colon), port);
            std::cerr << "listening on " << listen.substr(0, colon) << ":" << bound << "\n";
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            if (autostart) session.start();
            while (!session.done()) {
                if (g_interrupted) {
                    if (!session.started()) break;
                    session.stop();
                }
                std::this_thread::sleep_for(std::chrono::milliseconds(50));
            }
            if (!session.done()) return 0;
            const auto r = session.wait();
            if (!commands_out.empty()) write_text(commands_out, sim::command_log_json(r).dump(2) + "\n");
            emit(r, out, csv);
        } else if (*rep) {
            const auto log = sim::command_log_from_json(read_json(commands));
            emit(sim::replay(sim::load_scenario(config), log), out, csv);
        } else if (*presets) {
            if (*show) {
                const auto p = sim::find_preset(preset_name);
                if (!p) throw ConfigError("unknown preset " + preset_name);
                std::cout << sim::to_json(*p).dump(2) << "\n";
            } else {
                for (const auto& n : sim::preset_names()) std::cout << n << "\n";
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigExit;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kInvariantExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
