#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qosaic/model.hpp"

namespace qosaic {

using Point = std::array<double, 2>;

struct Placement {
    std::vector<Point> aps;
    std::vector<Point> users;
};

/// How the translator reads the backlog at the start of frame k.
enum class RequirementsQueue {
    post_arrival, // q[k-1] + a[k]: this frame's arrivals are already known
    pre_arrival,  // q[k-1]
};

struct SimOptions {
    std::size_t num_frames = 100;
    bool fading = true;
    double packet_bits = 1000.0;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    RequirementsQueue requirements_queue = RequirementsQueue::post_arrival;
    double utility_rho_bps_per_hz = 1.0; // log-utility offset, in units of the RB bandwidth
    bool capacity_precheck = true;
    bool pf_skip_empty_queues = true; // false: full-buffer PF, empty queues compete too
};

struct SweepSpec {
    std::vector<double> total_loads_bps;
    std::vector<double> split; // per-flow share of the total load; normalized on use
    bool rs_min_follows_input = true;
};

struct Scenario {
    std::string name;
    NetworkConfig network;
    std::vector<FlowSpec> flows;
    Placement placement;
    SolverParams solver;
    IlmParams ilm;
    SimOptions sim;
    SweepSpec sweep;
};

/// Every invariant violation of the scenario and its parameter blocks.
std::vector<std::string> validate_scenario(const Scenario& scenario);

/// APs on a regular grid, users uniform in the square; deterministic in `seed`.
Placement default_placement(const NetworkConfig& config, std::uint64_t seed);

/// Copy with per-flow mean arrivals set from a total load and the sweep split.
/// RS targets track their input rate when the sweep says so.
Scenario with_total_load(const Scenario& scenario, double total_load_bps);

nlohmann::json to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

/// Applies one "dotted.path=value" override to a scenario document. The value
/// is parsed as JSON when it parses, otherwise taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Built-in scenarios: "be_ds", "be_rs_ds", "lq_hq", "tiny".
Scenario make_preset(const std::string& name);
std::vector<std::string> preset_names();

} // namespace qosaic
