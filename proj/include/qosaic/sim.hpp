#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "qosaic/ilm.hpp"
#include "qosaic/model.hpp"
#include "qosaic/qosift.hpp"
#include "qosaic/scenario.hpp"
#include "qosaic/solver.hpp"

namespace qosaic {

enum class Scheduler { qosaic, pf };
std::string_view to_string(Scheduler scheduler);

/// Link gains of frame k: pathloss times optional unit-mean exponential block fading.
ChannelTensor generate_channels(const Scenario& scenario, std::size_t k, std::uint64_t seed);

/// Bits arriving to every flow in frame k: a Poisson number of fixed-size packets.
std::vector<double> generate_arrivals(const Scenario& scenario, std::size_t k, std::uint64_t seed);

/// Frame requirements in physical units for all flows.
FrameRequirements translate_requirements(const Scenario& scenario, const std::vector<FlowState>& state,
                                         const std::vector<double>& queue_bits, std::size_t k);

/// The solver's view of a frame: rates in bit/s/Hz, weights rescaled to match.
FrameProblem normalized_problem(const Scenario& scenario, const ChannelTensor& gains, const FrameRequirements& reqs);

struct FrameDecision {
    FrameSolution solution;      // rates in bit/s/Hz
    std::vector<double> rates_bps;
    FrameRequirements reqs;      // after relaxation
    std::vector<Relaxation> relaxations;
    std::size_t solves = 0;
    std::size_t capacity_skips = 0;
    std::size_t first_solve_outer = 0;
    bool first_solve_converged = false;
};

/// The solve / relax loop of one frame. `mean_outage_rmin` holds each flow's
/// running mean of O^{r_min} through the previous frame.
FrameDecision decide_frame(const Scenario& scenario, const ChannelTensor& gains, FrameRequirements reqs,
                           const std::vector<double>& mean_outage_rmin, SolverTrace* first_trace = nullptr);

/// Frame 1 of a QoSaIC run from empty queues, decided exactly as run_interframe decides it.
FrameDecision first_frame_decision(const Scenario& scenario, std::uint64_t seed, SolverTrace* trace = nullptr);

/// Max gamma / rbar assignment on every RB, greedy over (flow, AP) pairs: one
/// flow per AP and one AP per flow. Ties go to the lowest flow, then AP, index.
/// Flows with an empty queue compete too unless `skip_empty`.
Allocation pf_allocation(const ChannelTensor& gains, const std::vector<double>& r_bar,
                         const std::vector<double>& backlog_bits, bool skip_empty = true);

struct FlowFrameRecord {
    double arrivals_bits = 0.0;
    double allocated_bps = 0.0;
    double served_bps = 0.0;
    double queue_bits = 0.0;
    double rbar_bps = 0.0;
    double dbar_frames = 0.0;
    double r_min_bps = 0.0; // before relaxation
    double r_max_bps = 0.0;
    double weight = 0.0;
    double o_rmin = 0.0;
    double O_rmin = 0.0;
    double O_rbar_min = 0.0;
    double O_dbar_max = 0.0;
};

struct FrameSummary {
    std::size_t frame = 0;
    BreakReason break_reason = BreakReason::exhausted;
    bool converged = false;
    std::size_t solves = 0;
    std::size_t relaxations = 0;
    std::size_t capacity_skips = 0;
    std::size_t first_solve_outer = 0;
    bool first_solve_converged = false;
    double objective = 0.0;
};

struct FlowTotals {
    double arrived_bits = 0.0;
    double served_bits = 0.0;
    double final_queue_bits = 0.0;
    double mean_input_bps = 0.0;
    double mean_output_bps = 0.0;
    double residual_bps = 0.0;
    double amended_bps = 0.0;
    double mean_O_rmin = 0.0;
    double mean_O_rbar_min = 0.0;
    double mean_O_dbar_max = 0.0;
    double mean_o_rmin = 0.0;
};

struct IlmEvent {
    std::size_t frame = 0;
    std::size_t flow = 0;
    double old_r_min_bps = 0.0;
    double new_r_min_bps = 0.0;
};

struct RunResult {
    Scheduler scheduler = Scheduler::qosaic;
    std::uint64_t seed = 0;
    std::vector<std::vector<FlowFrameRecord>> frames; // [frame][flow]
    std::vector<FrameSummary> summaries;
    std::vector<IlmEvent> ilm_events;
    std::vector<FlowState> final_state;
    std::vector<FlowTotals> totals;
    bool interrupted = false;
};

struct RunHooks {
    const std::atomic<bool>* stop = nullptr;
    SolverTrace* first_frame_trace = nullptr; // first solve of frame `trace_frame`
    std::size_t trace_frame = 1;
};

RunResult run_interframe(const Scenario& scenario, std::uint64_t seed, const RunHooks& hooks = {});
RunResult run_pf_baseline(const Scenario& scenario, std::uint64_t seed, const RunHooks& hooks = {});
RunResult run_scheduler(Scheduler scheduler, const Scenario& scenario, std::uint64_t seed,
                        const RunHooks& hooks = {});

/// Mean served rate plus the final backlog spread over the run, credited by
/// the empirical probability of a frame without min-rate outage.
double amended_output(double mean_output_bps, double mean_o_rmin, double residual_bps);

/// Per-flow totals and amended outputs of a finished run.
std::vector<FlowTotals> summarize(const Scenario& scenario, const RunResult& run);

struct SweepRun {
    std::size_t load_index = 0;
    double total_load_bps = 0.0;
    RunResult result;
};

/// Runs the chosen schedulers at every load and seed with matched channels and
/// arrivals. `on_run` sees every finished run in order; returns early on stop.
std::vector<SweepRun> load_sweep(const Scenario& scenario, const std::vector<Scheduler>& schedulers,
                                 const std::function<void(const SweepRun&)>& on_run = {},
                                 const std::atomic<bool>* stop = nullptr);

} // namespace qosaic
