#include "qosaic/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qosaic {

using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out)
{
    if (j.contains(key)) {
        out = j.at(key).get<T>();
    }
}

void read_optional(const json& j, const char* key, std::optional<double>& out)
{
    if (j.contains(key) && !j.at(key).is_null()) {
        out = j.at(key).get<double>();
    } else {
        out.reset();
    }
}

json network_to_json(const NetworkConfig& c)
{
    return {{"num_flows", c.num_flows},
            {"num_aps", c.num_aps},
            {"num_rbs", c.num_rbs},
            {"rb_bandwidth_hz", c.rb_bandwidth_hz},
            {"rb_duration_s", c.rb_duration_s},
            {"area_side_m", c.area_side_m},
            {"pathloss_exponent", c.pathloss_exponent},
            {"noise_power", c.noise_power},
            {"tx_power_per_rb", c.tx_power_per_rb},
            {"reference_distance_m", c.reference_distance_m},
            {"min_distance_m", c.min_distance_m},
            {"rng_seed", c.rng_seed}};
}

NetworkConfig network_from_json(const json& j)
{
    NetworkConfig c;
    read_if(j, "num_flows", c.num_flows);
    read_if(j, "num_aps", c.num_aps);
    read_if(j, "num_rbs", c.num_rbs);
    read_if(j, "rb_bandwidth_hz", c.rb_bandwidth_hz);
    read_if(j, "rb_duration_s", c.rb_duration_s);
    read_if(j, "area_side_m", c.area_side_m);
    read_if(j, "pathloss_exponent", c.pathloss_exponent);
    read_if(j, "noise_power", c.noise_power);
    read_if(j, "tx_power_per_rb", c.tx_power_per_rb);
    read_if(j, "reference_distance_m", c.reference_distance_m);
    read_if(j, "min_distance_m", c.min_distance_m);
    read_if(j, "rng_seed", c.rng_seed);
    return c;
}

json flow_to_json(const FlowSpec& f)
{
    json j = {{"flow_id", f.flow_id}, {"qos", std::string(to_string(f.qos))}, {"mean_arrival_bps", f.mean_arrival_bps}};
    if (f.rbar_min_bps) {
        j["rbar_min_bps"] = *f.rbar_min_bps;
    }
    if (f.rbar_max_bps) {
        j["rbar_max_bps"] = *f.rbar_max_bps;
    }
    if (f.dbar_max_frames) {
        j["dbar_max_frames"] = *f.dbar_max_frames;
    }
    return j;
}

FlowSpec flow_from_json(const json& j, std::size_t index)
{
    FlowSpec f;
    f.flow_id = index;
    read_if(j, "flow_id", f.flow_id);
    f.qos = qos_class_from_string(j.at("qos").get<std::string>());
    read_if(j, "mean_arrival_bps", f.mean_arrival_bps);
    read_optional(j, "rbar_min_bps", f.rbar_min_bps);
    read_optional(j, "rbar_max_bps", f.rbar_max_bps);
    read_optional(j, "dbar_max_frames", f.dbar_max_frames);
    return f;
}

json solver_to_json(const SolverParams& p)
{
    return {{"sigmoid_sharpness", p.sigmoid_sharpness},
            {"eps_inner_first", p.eps_inner_first},
            {"eps_inner_limit", p.eps_inner_limit},
            {"inner_contraction", p.inner_contraction},
            {"inner_max", p.inner_max},
            {"eps_outer_mode", p.eps_outer_mode == EpsOuterMode::relative ? "relative" : "absolute"},
            {"eps_outer_first", p.eps_outer_first},
            {"outer_expansion", p.outer_expansion},
            {"outer_max", p.outer_max},
            {"dual_base", p.dual_base},
            {"step_shrink", p.step_shrink},
            {"jump_start", p.jump_start},
            {"log_cap", p.log_cap},
            {"multiplier_cap", p.multiplier_cap},
            {"denom_floor", p.denom_floor},
            {"int_tol", p.int_tol},
            {"initial_allocation", p.initial_allocation},
            {"sweep", p.sweep == SweepOrder::gauss_seidel ? "gauss_seidel" : "jacobi"},
            {"project_in_sweep", p.project_in_sweep},
            {"phy1_check_at_break_only", p.phy1_check_at_break_only}};
}

SolverParams solver_from_json(const json& j)
{
    SolverParams p;
    read_if(j, "sigmoid_sharpness", p.sigmoid_sharpness);
    read_if(j, "eps_inner_first", p.eps_inner_first);
    read_if(j, "eps_inner_limit", p.eps_inner_limit);
    read_if(j, "inner_contraction", p.inner_contraction);
    read_if(j, "inner_max", p.inner_max);
    if (j.contains("eps_outer_mode")) {
        const std::string mode = j.at("eps_outer_mode").get<std::string>();
        if (mode == "relative") {
            p.eps_outer_mode = EpsOuterMode::relative;
        } else if (mode == "absolute") {
            p.eps_outer_mode = EpsOuterMode::absolute;
        } else {
            throw std::invalid_argument("eps_outer_mode must be 'relative' or 'absolute'");
        }
    }
    read_if(j, "eps_outer_first", p.eps_outer_first);
    read_if(j, "outer_expansion", p.outer_expansion);
    read_if(j, "outer_max", p.outer_max);
    read_if(j, "dual_base", p.dual_base);
    read_if(j, "step_shrink", p.step_shrink);
    read_if(j, "jump_start", p.jump_start);
    read_if(j, "log_cap", p.log_cap);
    read_if(j, "multiplier_cap", p.multiplier_cap);
    read_if(j, "denom_floor", p.denom_floor);
    read_if(j, "int_tol", p.int_tol);
    read_if(j, "initial_allocation", p.initial_allocation);
    if (j.contains("sweep")) {
        const std::string order = j.at("sweep").get<std::string>();
        if (order == "gauss_seidel") {
            p.sweep = SweepOrder::gauss_seidel;
        } else if (order == "jacobi") {
            p.sweep = SweepOrder::jacobi;
        } else {
            throw std::invalid_argument("solver.sweep must be 'gauss_seidel' or 'jacobi'");
        }
    }
    read_if(j, "project_in_sweep", p.project_in_sweep);
    read_if(j, "phy1_check_at_break_only", p.phy1_check_at_break_only);
    return p;
}

json ilm_to_json(const IlmParams& p)
{
    return {{"give_up_ratio", p.give_up_ratio},
            {"relax_factor", p.relax_factor},
            {"selection", p.selection == IlmSelection::argmax ? "argmax" : "argmin"}};
}

IlmParams ilm_from_json(const json& j)
{
    IlmParams p;
    read_if(j, "give_up_ratio", p.give_up_ratio);
    read_if(j, "relax_factor", p.relax_factor);
    if (j.contains("selection")) {
        const std::string s = j.at("selection").get<std::string>();
        if (s == "argmax") {
            p.selection = IlmSelection::argmax;
        } else if (s == "argmin") {
            p.selection = IlmSelection::argmin;
        } else {
            throw std::invalid_argument("ilm.selection must be 'argmax' or 'argmin'");
        }
    }
    return p;
}

json sim_to_json(const SimOptions& s)
{
    return {{"num_frames", s.num_frames},
            {"fading", s.fading},
            {"packet_bits", s.packet_bits},
            {"seeds", s.seeds},
            {"requirements_queue",
             s.requirements_queue == RequirementsQueue::post_arrival ? "post_arrival" : "pre_arrival"},
            {"utility_rho_bps_per_hz", s.utility_rho_bps_per_hz},
            {"capacity_precheck", s.capacity_precheck},
            {"pf_skip_empty_queues", s.pf_skip_empty_queues}};
}

SimOptions sim_from_json(const json& j)
{
    SimOptions s;
    read_if(j, "num_frames", s.num_frames);
    read_if(j, "fading", s.fading);
    read_if(j, "packet_bits", s.packet_bits);
    read_if(j, "seeds", s.seeds);
    if (j.contains("requirements_queue")) {
        const std::string q = j.at("requirements_queue").get<std::string>();
        if (q == "post_arrival") {
            s.requirements_queue = RequirementsQueue::post_arrival;
        } else if (q == "pre_arrival") {
            s.requirements_queue = RequirementsQueue::pre_arrival;
        } else {
            throw std::invalid_argument("sim.requirements_queue must be 'post_arrival' or 'pre_arrival'");
        }
    }
    read_if(j, "utility_rho_bps_per_hz", s.utility_rho_bps_per_hz);
    read_if(j, "capacity_precheck", s.capacity_precheck);
    read_if(j, "pf_skip_empty_queues", s.pf_skip_empty_queues);
    return s;
}

json points_to_json(const std::vector<Point>& points)
{
    json arr = json::array();
    for (const Point& p : points) {
        arr.push_back({p[0], p[1]});
    }
    return arr;
}

std::vector<Point> points_from_json(const json& j)
{
    std::vector<Point> out;
    for (const json& p : j) {
        if (!p.is_array() || p.size() != 2) {
            throw std::invalid_argument("positions must be [x, y] pairs");
        }
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
}

std::vector<FlowSpec> flows_with_classes(std::size_t count, const std::vector<std::size_t>& rs,
                                         const std::vector<std::size_t>& ds, double per_flow_bps)
{
    std::vector<FlowSpec> flows(count);
    for (std::size_t i = 0; i < count; ++i) {
        flows[i].flow_id = i;
        flows[i].mean_arrival_bps = per_flow_bps;
    }
    for (std::size_t i : rs) {
        flows[i].qos = QosClass::rate_sensitive;
        flows[i].rbar_min_bps = per_flow_bps;
    }
    for (std::size_t i : ds) {
        flows[i].qos = QosClass::delay_sensitive;
        flows[i].dbar_max_frames = 20.0;
    }
    return flows;
}

} // namespace

std::vector<std::string> validate_scenario(const Scenario& s)
{
    std::vector<std::string> errors = validate_network(s.network);
    auto append = [&errors](const std::vector<std::string>& more) {
        errors.insert(errors.end(), more.begin(), more.end());
    };
    append(validate_flows(s.network, s.flows));
    append(validate_solver(s.solver));
    append(validate_ilm(s.ilm));

    if (s.placement.aps.size() != s.network.num_aps) {
        errors.emplace_back("dimension mismatch: placement.aps must have num_aps entries");
    }
    if (s.placement.users.size() != s.network.num_flows) {
        errors.emplace_back("dimension mismatch: placement.users must have num_flows entries");
    }
    auto inside = [&](const Point& p) {
        return p[0] >= 0.0 && p[1] >= 0.0 && p[0] <= s.network.area_side_m && p[1] <= s.network.area_side_m;
    };
    for (const Point& p : s.placement.aps) {
        if (!inside(p)) {
            errors.emplace_back("AP position outside the area");
            break;
        }
    }
    for (const Point& p : s.placement.users) {
        if (!inside(p)) {
            errors.emplace_back("user position outside the area");
            break;
        }
    }
    if (s.sim.num_frames < 1) {
        errors.emplace_back("sim.num_frames must be >= 1");
    }
    if (s.sim.seeds.empty()) {
        errors.emplace_back("sim.seeds must not be empty");
    }
    if (!(s.sim.packet_bits >= 1.0 && s.sim.packet_bits == std::floor(s.sim.packet_bits))) {
        errors.emplace_back("sim.packet_bits must be a positive whole number");
    }
    if (!(s.sim.utility_rho_bps_per_hz > 0.0)) {
        errors.emplace_back("sim.utility_rho_bps_per_hz must be > 0");
    }
    for (double load : s.sweep.total_loads_bps) {
        if (!(std::isfinite(load) && load >= 0.0)) {
            errors.emplace_back("sweep loads must be finite and >= 0");
            break;
        }
    }
    if (!std::is_sorted(s.sweep.total_loads_bps.begin(), s.sweep.total_loads_bps.end())) {
        errors.emplace_back("sweep loads must be sorted");
    }
    if (!s.sweep.split.empty()) {
        if (s.sweep.split.size() != s.network.num_flows) {
            errors.emplace_back("dimension mismatch: sweep.split must have num_flows entries");
        }
        double total = 0.0;
        for (double w : s.sweep.split) {
            if (!(w >= 0.0)) {
                errors.emplace_back("sweep.split entries must be >= 0");
                break;
            }
            total += w;
        }
        if (!(total > 0.0)) {
            errors.emplace_back("sweep.split must have a positive sum");
        }
    }
    return errors;
}

Placement default_placement(const NetworkConfig& config, std::uint64_t seed)
{
    Placement out;
    const double side = config.area_side_m;
    const auto cols = std::size_t(std::ceil(std::sqrt(double(config.num_aps))));
    const std::size_t rows = (config.num_aps + cols - 1) / cols;
    for (std::size_t i = 0; i < config.num_aps; ++i) {
        const std::size_t r = i / cols;
        const std::size_t c = i % cols;
        out.aps.push_back({side * (double(c) + 0.5) / double(cols), side * (double(r) + 0.5) / double(rows)});
    }
    std::seed_seq seq{seed, std::uint64_t{0x706c6163}};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> coord(0.0, side);
    for (std::size_t i = 0; i < config.num_flows; ++i) {
        const double x = coord(rng);
        const double y = coord(rng);
        out.users.push_back({x, y});
    }
    return out;
}

Scenario with_total_load(const Scenario& scenario, double total_load_bps)
{
    Scenario out = scenario;
    const std::size_t n = out.flows.size();
    std::vector<double> split = out.sweep.split;
    if (split.empty()) {
        split.assign(n, 1.0);
    }
    double total = 0.0;
    for (double w : split) {
        total += w;
    }
    for (std::size_t i = 0; i < n; ++i) {
        FlowSpec& f = out.flows[i];
        f.mean_arrival_bps = total > 0.0 ? total_load_bps * split[i] / total : 0.0;
        if (f.qos == QosClass::rate_sensitive && out.sweep.rs_min_follows_input) {
            f.rbar_min_bps = f.mean_arrival_bps;
            if (f.rbar_max_bps && *f.rbar_max_bps < f.mean_arrival_bps) {
                f.rbar_max_bps = f.mean_arrival_bps;
            }
        }
    }
    return out;
}

json to_json(const Scenario& s)
{
    json flows = json::array();
    for (const FlowSpec& f : s.flows) {
        flows.push_back(flow_to_json(f));
    }
    return {{"name", s.name},
            {"network", network_to_json(s.network)},
            {"flows", flows},
            {"placement", {{"aps", points_to_json(s.placement.aps)}, {"users", points_to_json(s.placement.users)}}},
            {"solver", solver_to_json(s.solver)},
            {"ilm", ilm_to_json(s.ilm)},
            {"sim", sim_to_json(s.sim)},
            {"sweep",
             {{"total_loads_bps", s.sweep.total_loads_bps},
              {"split", s.sweep.split},
              {"rs_min_follows_input", s.sweep.rs_min_follows_input}}}};
}

Scenario scenario_from_json(const json& j)
{
    Scenario s;
    read_if(j, "name", s.name);
    if (j.contains("network")) {
        s.network = network_from_json(j.at("network"));
    }
    if (j.contains("flows")) {
        const json& flows = j.at("flows");
        for (std::size_t i = 0; i < flows.size(); ++i) {
            s.flows.push_back(flow_from_json(flows[i], i));
        }
    }
    if (j.contains("placement")) {
        const json& pl = j.at("placement");
        if (pl.contains("aps")) {
            s.placement.aps = points_from_json(pl.at("aps"));
        }
        if (pl.contains("users")) {
            s.placement.users = points_from_json(pl.at("users"));
        }
    }
    if (s.placement.aps.empty() && s.placement.users.empty()) {
        s.placement = default_placement(s.network, s.network.rng_seed);
    }
    if (j.contains("solver")) {
        s.solver = solver_from_json(j.at("solver"));
    }
    if (j.contains("ilm")) {
        s.ilm = ilm_from_json(j.at("ilm"));
    }
    if (j.contains("sim")) {
        s.sim = sim_from_json(j.at("sim"));
    }
    if (j.contains("sweep")) {
        const json& sw = j.at("sweep");
        read_if(sw, "total_loads_bps", s.sweep.total_loads_bps);
        read_if(sw, "split", s.sweep.split);
        read_if(sw, "rs_min_follows_input", s.sweep.rs_min_follows_input);
    }
    return s;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scenario file '" + path + "'");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(doc);
}

void save_scenario(const Scenario& scenario, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write scenario file '" + path + "'");
    }
    out << to_json(scenario).dump(2) << '\n';
}

void apply_override(json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument("override '" + assignment + "' must look like key.path=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }

    json* node = &doc;
    std::stringstream keys(path);
    std::string key;
    std::vector<std::string> parts;
    while (std::getline(keys, key, '.')) {
        if (key.empty()) {
            throw std::invalid_argument("override '" + assignment + "' has an empty key");
        }
        parts.push_back(key);
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& part = parts[i];
        const bool last = i + 1 == parts.size();
        if (node->is_array()) {
            std::size_t index = 0;
            try {
                index = std::stoul(part);
            } catch (const std::exception&) {
                throw std::invalid_argument("override '" + assignment + "': '" + part + "' is not an index");
            }
            if (index >= node->size()) {
                throw std::invalid_argument("override '" + assignment + "': index out of range");
            }
            node = &(*node)[index];
        } else {
            if (!node->is_object()) {
                throw std::invalid_argument("override '" + assignment + "' descends into a scalar");
            }
            if (!last && !node->contains(part)) {
                (*node)[part] = json::object();
            }
            node = &(*node)[part];
        }
        if (last) {
            *node = value;
        }
    }
}

std::vector<std::string> preset_names() { return {"be_ds", "be_rs_ds", "lq_hq", "tiny"}; }

Scenario make_preset(const std::string& name)
{
    Scenario s;
    s.name = name;
    const std::vector<double> paper_loads{0.0,   0.5e6, 1.0e6, 1.5e6, 1.8e6, 2.0e6,
                                          2.2e6, 2.3e6, 2.5e6, 3.0e6, 3.5e6, 4.5e6};
    if (name == "be_ds") {
        s.flows = flows_with_classes(8, {}, {6, 7}, 1.5e6 / 8.0);
        s.sweep.total_loads_bps = paper_loads;
    } else if (name == "be_rs_ds") {
        s.flows = flows_with_classes(8, {2, 4}, {6, 7}, 1.5e6 / 8.0);
        s.sweep.total_loads_bps = paper_loads;
    } else if (name == "lq_hq") {
        s.flows = flows_with_classes(8, {2, 4}, {6, 7}, 1.5e6 / 8.0);
        s.sweep.total_loads_bps = paper_loads;
        s.sweep.split = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 2.0};
        const double total = 8.5;
        for (std::size_t i = 0; i < 8; ++i) {
            s.flows[i].mean_arrival_bps = 1.5e6 * s.sweep.split[i] / total;
            if (s.flows[i].rbar_min_bps) {
                s.flows[i].rbar_min_bps = s.flows[i].mean_arrival_bps;
            }
        }
    } else if (name == "tiny") {
        s.network.num_flows = 3;
        s.network.num_aps = 2;
        s.network.num_rbs = 2;
        s.flows = flows_with_classes(3, {1}, {2}, 100e3);
        s.sim.num_frames = 10;
        s.sim.seeds = {1};
        s.sweep.total_loads_bps = {0.0, 0.3e6};
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    s.placement = default_placement(s.network, s.network.rng_seed);
    return s;
}

} // namespace qosaic
