#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qosaic/tensor.hpp"

namespace qosaic {

enum class QosClass { best_effort, rate_sensitive, delay_sensitive };

std::string_view to_string(QosClass qos);
QosClass qos_class_from_string(std::string_view name);

/// Physical layout and link-budget constants of the network.
struct NetworkConfig {
    std::size_t num_flows = 8;
    std::size_t num_aps = 4;
    std::size_t num_rbs = 5;
    double rb_bandwidth_hz = 180e3;
    double rb_duration_s = 1e-3;
    double area_side_m = 800.0;
    double pathloss_exponent = 3.5;
    // Linear units relative to the noise floor. With a 1 m reference
    // distance, a user 100 m from its AP sees 3 dB SNR on one RB.
    double noise_power = 1.0;
    double tx_power_per_rb = 2e7;
    double reference_distance_m = 1.0;
    double min_distance_m = 1.0;
    std::uint64_t rng_seed = 1;

    Dims dims() const { return {num_flows, num_aps, num_rbs}; }
};

struct FlowSpec {
    std::size_t flow_id = 0;
    QosClass qos = QosClass::best_effort;
    std::optional<double> rbar_min_bps;
    std::optional<double> rbar_max_bps;
    std::optional<double> dbar_max_frames;
    double mean_arrival_bps = 0.0;
};

/// Per-frame link gains gamma(j)_{phi,p}: tx power x antenna gain x channel power.
using ChannelTensor = Tensor3;

/// Allocation variable x(j)_{phi,p}; relaxed entries live in [0,1].
using Allocation = Tensor3;

/// Lagrange multipliers: s per flow (min rate), u per (AP,RB), v per (flow,RB).
struct DualState {
    std::vector<double> s;
    std::vector<double> u; // index rb * aps + ap
    std::vector<double> v; // index rb * flows + flow
    Dims dims{};

    DualState() = default;
    explicit DualState(Dims d) : s(d.flows, 0.0), u(d.aps * d.rbs, 0.0), v(d.flows * d.rbs, 0.0), dims(d) {}

    double& u_at(std::size_t ap, std::size_t rb) { return u[rb * dims.aps + ap]; }
    double u_at(std::size_t ap, std::size_t rb) const { return u[rb * dims.aps + ap]; }
    double& v_at(std::size_t flow, std::size_t rb) { return v[rb * dims.flows + flow]; }
    double v_at(std::size_t flow, std::size_t rb) const { return v[rb * dims.flows + flow]; }
};

/// Running sums of the per-frame outage measures; means are arithmetic over frames.
struct OutageAccumulator {
    double rmin = 0.0;           // sum of O^{r_min}
    double rbar_min = 0.0;       // sum of O^{rbar_min}
    double dbar_max = 0.0;       // sum of O^{dbar_max}
    double rmin_indicator = 0.0; // sum of o^{r_min}
    std::size_t frames = 0;

    double mean_rmin() const { return frames ? rmin / double(frames) : 0.0; }
    double mean_rbar_min() const { return frames ? rbar_min / double(frames) : 0.0; }
    double mean_dbar_max() const { return frames ? dbar_max / double(frames) : 0.0; }
    double mean_rmin_indicator() const { return frames ? rmin_indicator / double(frames) : 0.0; }
};

/// Queue and running-mean history of one flow, as seen at the start of a frame.
struct FlowState {
    double q = 0.0;           // backlog, bits
    double q_bar = 0.0;       // running mean of end-of-frame backlog through the last frame, bits
    double q_prev2_bar = 0.0; // running mean one frame earlier (qbar[k-2] for frame k), bits
    double r_bar = 0.0;       // running mean served rate, bits/s
    double d_bar = 0.0;       // running mean delay estimate, frames
    double r_prev = 0.0;      // last frame's served rate, bits/s
    OutageAccumulator outage;
};

/// Translated per-frame requirements (bits/s) and fairness weights (per bit/s).
struct FrameRequirements {
    std::vector<double> r_min;
    std::vector<double> r_max;
    std::vector<double> w;
    std::vector<double> r_min_original;

    explicit FrameRequirements(std::size_t flows = 0)
        : r_min(flows, 0.0), r_max(flows, 0.0), w(flows, 0.0), r_min_original(flows, 0.0)
    {
    }
    std::size_t size() const { return r_min.size(); }
};

enum class EpsOuterMode { relative, absolute };
enum class SweepOrder { gauss_seidel, jacobi };

struct SolverParams {
    double sigmoid_sharpness = 0.1; // nu
    double eps_inner_first = 1e-1;
    double eps_inner_limit = 1e-2;
    double inner_contraction = 1.1; // varepsilon, > 1
    std::size_t inner_max = 30;
    EpsOuterMode eps_outer_mode = EpsOuterMode::relative;
    double eps_outer_first = 1e-2;
    double outer_expansion = 1.05; // varrho, > 1
    std::size_t outer_max = 150;
    double dual_base = 2.0;         // aleph, > 1
    double step_shrink = 0.25;      // varpi
    double jump_start = 0.1;        // vartheta
    double log_cap = 5.0;           // delta_max
    double multiplier_cap = 1e8;    // lambda_max
    double denom_floor = 1e-12;
    double int_tol = 1e-3;
    double initial_allocation = 1.0; // starting value of every relaxed entry
    SweepOrder sweep = SweepOrder::gauss_seidel;
    bool project_in_sweep = true;
    bool phy1_check_at_break_only = false;
};

enum class IlmSelection { argmax, argmin };

struct IlmParams {
    double give_up_ratio = 1e-3; // sigma
    double relax_factor = 0.6;   // gimel^dec
    IlmSelection selection = IlmSelection::argmax;
};

/// Returns every invariant violation; an empty list means the inputs are valid.
std::vector<std::string> validate_network(const NetworkConfig& config);
std::vector<std::string> validate_flows(const NetworkConfig& config, const std::vector<FlowSpec>& flows);
std::vector<std::string> validate_solver(const SolverParams& params);
std::vector<std::string> validate_ilm(const IlmParams& params);

} // namespace qosaic
