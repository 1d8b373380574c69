#include "qosaic/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qosaic {

std::string_view to_string(QosClass qos)
{
    switch (qos) {
    case QosClass::best_effort:
        return "BE";
    case QosClass::rate_sensitive:
        return "RS";
    case QosClass::delay_sensitive:
        return "DS";
    }
    return "BE";
}

QosClass qos_class_from_string(std::string_view name)
{
    if (name == "BE") {
        return QosClass::best_effort;
    }
    if (name == "RS") {
        return QosClass::rate_sensitive;
    }
    if (name == "DS") {
        return QosClass::delay_sensitive;
    }
    throw std::invalid_argument("unknown QoS class '" + std::string(name) + "'");
}

namespace {

bool positive(double value) { return std::isfinite(value) && value > 0.0; }

void require_positive(std::vector<std::string>& errors, double value, const char* name)
{
    if (!positive(value)) {
        errors.push_back(std::string(name) + " must be > 0");
    }
}

} // namespace

std::vector<std::string> validate_network(const NetworkConfig& config)
{
    std::vector<std::string> errors;
    if (config.num_flows < 1) {
        errors.emplace_back("num_flows must be >= 1");
    }
    if (config.num_aps < 1) {
        errors.emplace_back("num_aps must be >= 1");
    }
    if (config.num_rbs < 1) {
        errors.emplace_back("num_rbs must be >= 1");
    }
    require_positive(errors, config.rb_bandwidth_hz, "rb_bandwidth_hz");
    require_positive(errors, config.rb_duration_s, "rb_duration_s");
    require_positive(errors, config.tx_power_per_rb, "tx_power_per_rb");
    require_positive(errors, config.noise_power, "noise_power");
    require_positive(errors, config.area_side_m, "area_side_m");
    require_positive(errors, config.reference_distance_m, "reference_distance_m");
    require_positive(errors, config.min_distance_m, "min_distance_m");
    if (!(std::isfinite(config.pathloss_exponent) && config.pathloss_exponent >= 2.0)) {
        errors.emplace_back("pathloss_exponent must be >= 2");
    }
    return errors;
}

std::vector<std::string> validate_flows(const NetworkConfig& config, const std::vector<FlowSpec>& flows)
{
    std::vector<std::string> errors;
    if (flows.size() != config.num_flows) {
        errors.push_back("dimension mismatch: " + std::to_string(flows.size()) + " flow specs for num_flows = " +
                         std::to_string(config.num_flows));
    }
    for (std::size_t i = 0; i < flows.size(); ++i) {
        const FlowSpec& f = flows[i];
        const std::string tag = "flow " + std::to_string(i) + ": ";
        if (f.flow_id != i) {
            errors.push_back(tag + "flow_id must equal its position");
        }
        if (!(std::isfinite(f.mean_arrival_bps) && f.mean_arrival_bps >= 0.0)) {
            errors.push_back(tag + "mean_arrival_bps must be >= 0");
        }
        switch (f.qos) {
        case QosClass::best_effort:
            if (f.rbar_min_bps || f.rbar_max_bps || f.dbar_max_frames) {
                errors.push_back(tag + "QoS field on BE flow");
            }
            break;
        case QosClass::rate_sensitive:
            if (!f.rbar_min_bps || !positive(*f.rbar_min_bps)) {
                errors.push_back(tag + "RS flow needs rbar_min_bps > 0");
            }
            if (f.rbar_max_bps && f.rbar_min_bps && !(*f.rbar_min_bps <= *f.rbar_max_bps)) {
                errors.push_back(tag + "rbar_min_bps must not exceed rbar_max_bps");
            }
            if (f.dbar_max_frames) {
                errors.push_back(tag + "QoS field dbar_max_frames on RS flow");
            }
            break;
        case QosClass::delay_sensitive:
            if (!f.dbar_max_frames || !positive(*f.dbar_max_frames)) {
                errors.push_back(tag + "DS flow needs dbar_max_frames > 0");
            }
            if (f.rbar_min_bps || f.rbar_max_bps) {
                errors.push_back(tag + "QoS rate field on DS flow");
            }
            break;
        }
    }
    return errors;
}

std::vector<std::string> validate_solver(const SolverParams& p)
{
    std::vector<std::string> errors;
    require_positive(errors, p.sigmoid_sharpness, "sigmoid_sharpness");
    require_positive(errors, p.eps_inner_limit, "eps_inner_limit");
    if (!(p.eps_inner_first >= p.eps_inner_limit)) {
        errors.emplace_back("eps_inner_first must be >= eps_inner_limit");
    }
    if (!(p.inner_contraction > 1.0)) {
        errors.emplace_back("inner_contraction must be > 1");
    }
    if (p.inner_max < 1) {
        errors.emplace_back("inner_max must be >= 1");
    }
    require_positive(errors, p.eps_outer_first, "eps_outer_first");
    if (!(p.outer_expansion > 1.0)) {
        errors.emplace_back("outer_expansion must be > 1");
    }
    if (p.outer_max < 1) {
        errors.emplace_back("outer_max must be >= 1");
    }
    if (!(p.dual_base > 1.0)) {
        errors.emplace_back("dual_base must be > 1");
    }
    if (!(p.step_shrink >= 0.0)) {
        errors.emplace_back("step_shrink must be >= 0");
    }
    if (!(p.jump_start >= 0.0)) {
        errors.emplace_back("jump_start must be >= 0");
    }
    require_positive(errors, p.log_cap, "log_cap");
    require_positive(errors, p.multiplier_cap, "multiplier_cap");
    if (!(p.denom_floor >= 0.0)) {
        errors.emplace_back("denom_floor must be >= 0");
    }
    if (!(p.int_tol > 0.0 && p.int_tol < 0.5)) {
        errors.emplace_back("int_tol must be in (0, 0.5)");
    }
    if (!(p.initial_allocation >= 0.0 && p.initial_allocation <= 1.0)) {
        errors.emplace_back("initial_allocation must be in [0, 1]");
    }
    return errors;
}

std::vector<std::string> validate_ilm(const IlmParams& p)
{
    std::vector<std::string> errors;
    if (!(p.give_up_ratio > 0.0 && p.give_up_ratio < 1.0)) {
        errors.emplace_back("give_up_ratio must be in (0, 1)");
    }
    if (!(p.relax_factor > 0.0 && p.relax_factor < 1.0)) {
        errors.emplace_back("relax_factor must be in (0, 1)");
    }
    return errors;
}

} // namespace qosaic
