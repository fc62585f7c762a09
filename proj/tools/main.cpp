#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "smsim/simulation.hpp"

using namespace smsim;

namespace {

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            bool ideal, double duration, double dt, long seed,
            bool truth_diagnostics) {
    ScenarioConfig cfg = ScenarioConfig::load(scenario_path);
    if (ideal) cfg.actuators.fidelity = "ideal";
    if (duration > 0.0) {
        cfg.duration_s = duration;
        if (cfg.timeline.back().t_end_s < duration) {
            PhaseConfig tail{"hold", duration};
            cfg.timeline.push_back(tail);
        }
    }
    if (dt > 0.0) cfg.physics_dt_s = dt;
    if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
    if (truth_diagnostics) cfg.truth_diagnostics = true;
    cfg.validate();

    const RunResult result = Simulation::run(cfg, out_dir);
    std::printf("run '%s': %s", cfg.name.c_str(), result.ok ? "ok" : "FAILED");
    if (!result.ok && result.fail_time_s >= 0.0) {
        std::printf(" at t = %.3f s", result.fail_time_s);
    }
    std::printf("\n  telemetry: %s/telemetry.csv\n  summary:   %s/summary.json\n",
                out_dir.c_str(), out_dir.c_str());
    return result.ok ? 0 : 1;
}

int cmd_paper_scenario(const std::string& emit_path, bool reduced) {
    const ScenarioConfig cfg =
        reduced ? build_reduced_scenario() : build_paper_scenario();
    cfg.save(emit_path);
    std::printf("wrote %s scenario to %s\n", cfg.name.c_str(), emit_path.c_str());
    return 0;
}

int cmd_summarize(const std::string& telemetry_path,
                  const std::string& out_path) {
    const Telemetry t = read_telemetry_csv(telemetry_path);
    const RunSummary s = summarize_telemetry(t);
    const std::string text = s.to_json_string();
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        out << text;
        std::printf("wrote summary to %s\n", out_path.c_str());
    }
    return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& grid_path,
              const std::string& out_dir, int jobs) {
    std::ifstream grid_in(grid_path);
    if (!grid_in) {
        throw ConfigError("cannot open grid file: " + grid_path);
    }
    nlohmann::json grid = nlohmann::json::parse(grid_in);
    std::ifstream base_in(scenario_path);
    if (!base_in) {
        throw ConfigError("cannot open scenario file: " + scenario_path);
    }
    const nlohmann::json base = nlohmann::json::parse(base_in);

    struct Job {
        std::string name;
        ScenarioConfig cfg;
    };
    std::vector<Job> queue;
    for (const auto& entry : grid.at("runs")) {
        nlohmann::json patched = base;
        const std::string name = entry.at("name");
        for (const auto& [pointer, value] :
             entry.at("overrides").items()) {
            patched[nlohmann::json::json_pointer(pointer)] = value;
        }
        queue.push_back({name, ScenarioConfig::from_json_string(patched.dump())});
    }

    std::mutex print_mutex;
    std::atomic<size_t> next{0};
    std::atomic<int> failures{0};
    auto worker = [&] {
        while (true) {
            const size_t k = next.fetch_add(1);
            if (k >= queue.size()) break;
            const Job& job = queue[k];
            const std::string dir = out_dir + "/" + job.name;
            const RunResult res = Simulation::run(job.cfg, dir);
            if (!res.ok) failures.fetch_add(1);
            std::lock_guard<std::mutex> lock(print_mutex);
            std::printf("sweep '%s': %s\n", job.name.c_str(),
                        res.ok ? "ok" : "FAILED");
        }
    };
    jobs = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return failures.load() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"free-flying space manipulator simulation"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", emit_path, telemetry_path,
                grid_path, summary_out;
    bool ideal = false, reduced = false, truth_diagnostics = false;
    double duration = -1.0, dt = -1.0;
    long seed = -1;
    int jobs = 1;

    CLI::App* run = app.add_subcommand("run", "execute a scenario");
    run->add_option("--scenario", scenario_path, "scenario JSON file")
        ->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--ideal-actuators", ideal,
                  "replace the actuator stack with clipped pass-through");
    run->add_option("--duration", duration, "override duration [s]");
    run->add_option("--dt", dt, "override the physics step [s]");
    run->add_option("--seed", seed, "override the noise seed");
    run->add_flag("--truth-diagnostics", truth_diagnostics,
                  "force the Lyapunov diagnostic column on");

    CLI::App* paper = app.add_subcommand(
        "paper-scenario", "emit the built-in reproduction scenario");
    paper->add_option("--emit", emit_path, "output JSON path")->required();
    paper->add_flag("--reduced", reduced, "emit the two-joint reduction instead");

    CLI::App* sweep = app.add_subcommand("sweep", "run a grid of overrides");
    sweep->add_option("--scenario", scenario_path, "base scenario JSON")
        ->required();
    sweep->add_option("--grid", grid_path, "grid JSON with named overrides")
        ->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--jobs", jobs, "concurrent runs");

    CLI::App* summarize =
        app.add_subcommand("summarize", "recompute a summary from telemetry");
    summarize->add_option("--telemetry", telemetry_path, "telemetry CSV")
        ->required();
    summarize->add_option("--out", summary_out, "summary JSON path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(scenario_path, out_dir, ideal, duration, dt, seed,
                           truth_diagnostics);
        }
        if (paper->parsed()) {
            return cmd_paper_scenario(emit_path, reduced);
        }
        if (sweep->parsed()) {
            return cmd_sweep(scenario_path, grid_path, out_dir, jobs);
        }
        if (summarize->parsed()) {
            return cmd_summarize(telemetry_path, summary_out);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
