#include <atomic>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qosaic/output.hpp"
#include "qosaic/scenario.hpp"
#include "qosaic/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qosaic;

namespace {

enum Exit { exit_ok = 0, exit_usage = 1, exit_validation = 2, exit_runtime = 3 };

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string scenario_path;
    std::string preset;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    std::string scheduler = "both";
};

Scenario resolve_scenario(const Options& opt)
{
    json doc;
    try {
        if (!opt.scenario_path.empty()) {
            std::ifstream in(opt.scenario_path);
            if (!in) {
                throw ValidationError("cannot open scenario file '" + opt.scenario_path + "'");
            }
            doc = json::parse(in);
        } else {
            doc = to_json(make_preset(opt.preset));
        }
        for (const std::string& a : opt.overrides) {
            apply_override(doc, a);
        }
        Scenario s = scenario_from_json(doc);
        const std::vector<std::string> errors = validate_scenario(s);
        if (!errors.empty()) {
            std::string msg = "invalid scenario:";
            for (const std::string& e : errors) {
                msg += "\n  " + e;
            }
            throw ValidationError(msg);
        }
        return s;
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("invalid scenario: ") + e.what());
    }
}

std::vector<Scheduler> schedulers_of(const std::string& name)
{
    if (name == "qosaic") {
        return {Scheduler::qosaic};
    }
    if (name == "pf") {
        return {Scheduler::pf};
    }
    return {Scheduler::qosaic, Scheduler::pf};
}

std::uint64_t run_seed(const Options& opt, const Scenario& s)
{
    if (opt.seed) {
        return *opt.seed;
    }
    if (s.sim.seeds.empty()) {
        throw ValidationError("scenario lists no seeds and --seed is not given");
    }
    return s.sim.seeds.front();
}

class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

    std::ofstream open(const std::string& name)
    {
        files_.push_back(name);
        std::ofstream out(dir_ / name);
        if (!out) {
            throw std::runtime_error("cannot write " + (dir_ / name).string());
        }
        return out;
    }

    void manifest(const std::string& command, const Scenario& s, const Options& opt, bool interrupted)
    {
        json m = make_manifest(command, s, opt.overrides, files_);
        m["interrupted"] = interrupted;
        std::ofstream out(dir_ / "manifest.json");
        out << m.dump(2) << '\n';
    }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

json solution_json(const FrameDecision& d)
{
    json relaxations = json::array();
    for (const Relaxation& r : d.relaxations) {
        relaxations.push_back({{"flow", r.flow}, {"old_r_min_bps", r.old_r_min}, {"new_r_min_bps", r.new_r_min}});
    }
    const Dims dims = d.solution.allocation.dims();
    json assignments = json::array();
    for (std::size_t j = 0; j < dims.rbs; ++j) {
        for (std::size_t p = 0; p < dims.aps; ++p) {
            for (std::size_t f = 0; f < dims.flows; ++f) {
                if (d.solution.allocation(f, p, j) > 0.5) {
                    assignments.push_back({{"rb", j}, {"ap", p}, {"flow", f}});
                }
            }
        }
    }
    return {{"converged", d.solution.converged},
            {"break_reason", std::string(to_string(d.solution.break_reason))},
            {"outer_iterations", d.solution.outer_iterations},
            {"solves", d.solves},
            {"objective", d.solution.objective},
            {"rates_bps", d.rates_bps},
            {"r_min_bps", d.reqs.r_min},
            {"assignments", assignments},
            {"relaxations", relaxations}};
}

int cmd_validate(const Options& opt)
{
    const Scenario s = resolve_scenario(opt);
    std::cout << "ok: " << (s.name.empty() ? "scenario" : s.name) << " (" << s.network.num_flows << " flows, "
              << s.network.num_aps << " APs, " << s.network.num_rbs << " RBs, " << s.sweep.total_loads_bps.size()
              << " sweep loads)\n";
    return exit_ok;
}

int cmd_preset(const std::string& name, const std::string& out_file)
{
    const json doc = to_json(make_preset(name));
    if (out_file.empty()) {
        std::cout << doc.dump(2) << '\n';
    } else {
        std::ofstream out(out_file);
        if (!out) {
            throw std::runtime_error("cannot write " + out_file);
        }
        out << doc.dump(2) << '\n';
    }
    return exit_ok;
}

int cmd_solve_frame(const Options& opt, bool trace_only)
{
    const Scenario s = resolve_scenario(opt);
    const std::uint64_t seed = run_seed(opt, s);
    SolverTrace trace;
    const FrameDecision d = first_frame_decision(s, seed, &trace);
    OutputDir dir(opt.out);
    if (!trace_only) {
        std::ofstream out = dir.open("solution.json");
        out << solution_json(d).dump(2) << '\n';
    }
    {
        std::ofstream out = dir.open("trace.csv");
        write_trace_csv(out, trace);
    }
    {
        std::ofstream out = dir.open("trace.jsonl");
        write_trace_jsonl(out, trace);
    }
    dir.manifest(trace_only ? "convergence-trace" : "solve-frame", s, opt, false);
    std::cout << to_string(d.solution.break_reason) << " after " << d.solution.outer_iterations
              << " outer iterations, " << d.solves << " solve(s)\n";
    return exit_ok;
}

int cmd_run(const Options& opt, const std::string& command, const std::vector<Scheduler>& schedulers)
{
    const Scenario s = resolve_scenario(opt);
    const std::uint64_t seed = run_seed(opt, s);
    OutputDir dir(opt.out);
    RunHooks hooks;
    hooks.stop = &g_stop;
    bool interrupted = false;
    std::vector<SweepRun> finished;
    double total_load = 0.0;
    for (const FlowSpec& f : s.flows) {
        total_load += f.mean_arrival_bps;
    }
    for (Scheduler sch : schedulers) {
        const RunResult run = run_scheduler(sch, s, seed, hooks);
        const std::string tag(to_string(sch));
        {
            std::ofstream out = dir.open("frames_" + tag + ".csv");
            write_frames_csv(out, s, run);
        }
        {
            std::ofstream out = dir.open("frame_summary_" + tag + ".csv");
            write_frame_summary_csv(out, run);
        }
        if (sch == Scheduler::qosaic) {
            std::ofstream out = dir.open("ilm_events.csv");
            write_ilm_csv(out, run);
        }
        finished.push_back({0, total_load, run});
        if (run.interrupted) {
            interrupted = true;
            break;
        }
    }
    {
        std::ofstream out = dir.open(command == "compare-pf" ? "compare_pf.csv" : "flows.csv");
        write_csv_header(out, sweep_flows_csv_columns());
        for (const SweepRun& r : finished) {
            write_sweep_flow_rows(out, s, r);
        }
    }
    dir.manifest(command, s, opt, interrupted);
    if (interrupted) {
        std::cerr << "interrupted: partial results written to " << opt.out << '\n';
        return exit_runtime;
    }
    return exit_ok;
}

int cmd_sweep(const Options& opt)
{
    Scenario s = resolve_scenario(opt);
    if (s.sweep.total_loads_bps.empty()) {
        throw ValidationError("invalid scenario: the sweep lists no loads");
    }
    if (opt.seed) {
        s.sim.seeds = {*opt.seed};
    }
    OutputDir dir(opt.out);
    std::ofstream flows = dir.open("sweep_flows.csv");
    write_csv_header(flows, sweep_flows_csv_columns());
    const std::vector<SweepRun> runs = load_sweep(
        s, schedulers_of(opt.scheduler),
        [&](const SweepRun& run) {
            write_sweep_flow_rows(flows, s, run);
            flows.flush();
            std::cerr << "load " << (run.load_index + 1) << "/" << s.sweep.total_loads_bps.size() << " seed "
                      << run.result.seed << " " << to_string(run.result.scheduler) << " done\n";
        },
        &g_stop);
    flows.close();
    {
        std::ofstream out = dir.open("sweep_summary.csv");
        write_sweep_summary_csv(out, summarize_sweep(s, runs));
    }
    const bool interrupted = g_stop.load();
    dir.manifest("sweep", s, opt, interrupted);
    if (interrupted) {
        std::cerr << "interrupted: " << runs.size() << " finished runs written to " << opt.out << '\n';
        return exit_runtime;
    }
    return exit_ok;
}

void add_common(CLI::App* sub, Options& opt, bool with_out)
{
    auto* file = sub->add_option("--scenario", opt.scenario_path, "Scenario JSON file");
    auto* preset = sub->add_option("--preset", opt.preset, "Built-in scenario instead of a file")
                       ->check(CLI::IsMember(preset_names()));
    file->excludes(preset);
    preset->excludes(file);
    sub->add_option("--set", opt.overrides, "Override a parameter, e.g. --set solver.outer_max=100");
    sub->add_option("--seed", opt.seed, "Run seed");
    if (with_out) {
        sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    }
    sub->callback([sub, &opt] {
        if (opt.scenario_path.empty() && opt.preset.empty()) {
            throw CLI::RequiredError(sub->get_name() + ": --scenario or --preset");
        }
    });
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-cell OFDMA downlink scheduling simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string);

    Options opt;
    auto* validate = app.add_subcommand("validate", "Check a scenario and exit");
    add_common(validate, opt, false);
    auto* solve = app.add_subcommand("solve-frame", "Solve frame 1 of a run and write the allocation");
    add_common(solve, opt, true);
    auto* trace = app.add_subcommand("convergence-trace", "Per-iteration solver trace of frame 1");
    add_common(trace, opt, true);
    auto* run = app.add_subcommand("run", "Simulate one seed");
    add_common(run, opt, true);
    run->add_option("--scheduler", opt.scheduler, "qosaic, pf or both")
        ->check(CLI::IsMember({"qosaic", "pf", "both"}))
        ->capture_default_str();
    auto* compare = app.add_subcommand("compare-pf", "Simulate one seed under both schedulers");
    add_common(compare, opt, true);
    auto* sweep = app.add_subcommand("sweep", "Simulate every load point and seed");
    add_common(sweep, opt, true);
    sweep->add_option("--scheduler", opt.scheduler, "qosaic, pf or both")
        ->check(CLI::IsMember({"qosaic", "pf", "both"}))
        ->capture_default_str();
    std::string preset_name;
    std::string preset_out;
    auto* preset = app.add_subcommand("preset", "Print a built-in scenario as JSON");
    preset->add_option("name", preset_name, "Preset name")->required()->check(CLI::IsMember(preset_names()));
    preset->add_option("--out", preset_out, "Write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    std::signal(SIGINT, on_sigint);
    try {
        if (*validate) {
            return cmd_validate(opt);
        }
        if (*solve) {
            return cmd_solve_frame(opt, false);
        }
        if (*trace) {
            return cmd_solve_frame(opt, true);
        }
        if (*run) {
            return cmd_run(opt, "run", schedulers_of(opt.scheduler));
        }
        if (*compare) {
            return cmd_run(opt, "compare-pf", {Scheduler::qosaic, Scheduler::pf});
        }
        if (*sweep) {
            return cmd_sweep(opt);
        }
        return cmd_preset(preset_name, preset_out);
    } catch (const ValidationError& e) {
        std::cerr << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}
