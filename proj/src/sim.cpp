#include "qosaic/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qosaic {

namespace {

constexpr std::uint64_t channel_stream = 1;
constexpr std::uint64_t arrival_stream = 2;

std::mt19937_64 frame_rng(std::uint64_t seed, std::uint64_t stream, std::size_t k)
{
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream), std::uint32_t(k),
                      std::uint32_t(std::uint64_t(k) >> 32)};
    return std::mt19937_64(seq);
}

RadioParams normalized_radio(const NetworkConfig& config)
{
    return {1.0, config.noise_power, 1.0};
}

double rbar_min_target(const FlowSpec& spec)
{
    return spec.qos == QosClass::rate_sensitive ? spec.rbar_min_bps.value_or(0.0) : 0.0;
}

double dbar_max_target(const FlowSpec& spec)
{
    return spec.qos == QosClass::delay_sensitive ? spec.dbar_max_frames.value_or(0.0) : 0.0;
}

// Shared frame loop; `allocate` returns the allocated physical rates of frame k.
template <typename Allocate>
RunResult run_loop(const Scenario& scenario, std::uint64_t seed, Scheduler scheduler, const RunHooks& hooks,
                   Allocate&& allocate)
{
    const std::size_t n = scenario.flows.size();
    const double tb = scenario.network.rb_duration_s;
    RunResult run;
    run.scheduler = scheduler;
    run.seed = seed;
    std::vector<FlowState> state(n);

    for (std::size_t k = 1; k <= scenario.sim.num_frames; ++k) {
        if (hooks.stop && hooks.stop->load()) {
            run.interrupted = true;
            break;
        }
        const std::vector<double> arrivals = generate_arrivals(scenario, k, seed);
        std::vector<double> queue(n);
        std::vector<double> req_queue(n);
        for (std::size_t f = 0; f < n; ++f) {
            queue[f] = state[f].q + arrivals[f];
            req_queue[f] =
                scenario.sim.requirements_queue == RequirementsQueue::post_arrival ? queue[f] : state[f].q;
        }
        const FrameRequirements reqs = translate_requirements(scenario, state, req_queue, k);
        const ChannelTensor gains = generate_channels(scenario, k, seed);

        FrameSummary summary;
        summary.frame = k;
        const std::vector<double> allocated = allocate(k, gains, reqs, state, queue, summary, run);

        const double h = forgetting_factor(k);
        std::vector<FlowFrameRecord> records(n);
        for (std::size_t f = 0; f < n; ++f) {
            FlowState& st = state[f];
            const FlowSpec& spec = scenario.flows[f];
            // Whole bits only, so that the bit balance is exact.
            const double served_bits = std::min(std::floor(allocated[f] * tb), queue[f]);
            const double served_bps = served_bits / tb;
            st.q = queue[f] - served_bits;
            st.q_prev2_bar = st.q_bar;
            st.q_bar = (1.0 - h) * st.q_bar + h * st.q;
            st.r_bar = (1.0 - h) * st.r_bar + h * served_bps;
            st.d_bar = littles_law_delay_frames(st.q_bar, st.r_bar, tb);
            st.r_prev = served_bps;
            const FrameOutage outage = frame_outages(allocated[f], reqs.r_min_original[f], st.r_bar,
                                                     rbar_min_target(spec), st.d_bar, dbar_max_target(spec));
            accumulate(st.outage, outage);

            FlowFrameRecord& rec = records[f];
            rec.arrivals_bits = arrivals[f];
            rec.allocated_bps = allocated[f];
            rec.served_bps = served_bps;
            rec.queue_bits = st.q;
            rec.rbar_bps = st.r_bar;
            rec.dbar_frames = st.d_bar;
            rec.r_min_bps = reqs.r_min_original[f];
            rec.r_max_bps = reqs.r_max[f];
            rec.weight = reqs.w[f];
            rec.o_rmin = outage.rmin_indicator;
            rec.O_rmin = outage.rmin;
            rec.O_rbar_min = outage.rbar_min;
            rec.O_dbar_max = outage.dbar_max;
        }
        run.frames.push_back(std::move(records));
        run.summaries.push_back(summary);
    }
    run.final_state = state;
    run.totals = summarize(scenario, run);
    return run;
}

} // namespace

std::string_view to_string(Scheduler scheduler)
{
    return scheduler == Scheduler::qosaic ? "qosaic" : "pf";
}

ChannelTensor generate_channels(const Scenario& scenario, std::size_t k, std::uint64_t seed)
{
    const NetworkConfig& c = scenario.network;
    ChannelTensor gains(c.dims());
    std::mt19937_64 rng = frame_rng(seed, channel_stream, k);
    std::exponential_distribution<double> fade(1.0);
    for (std::size_t j = 0; j < c.num_rbs; ++j) {
        for (std::size_t p = 0; p < c.num_aps; ++p) {
            for (std::size_t f = 0; f < c.num_flows; ++f) {
                const Point& u = scenario.placement.users.at(f);
                const Point& a = scenario.placement.aps.at(p);
                const double dist = std::max(std::hypot(u[0] - a[0], u[1] - a[1]), c.min_distance_m);
                double g = c.tx_power_per_rb * std::pow(dist / c.reference_distance_m, -c.pathloss_exponent);
                if (scenario.sim.fading) {
                    g *= fade(rng);
                }
                gains(f, p, j) = g;
            }
        }
    }
    return gains;
}

std::vector<double> generate_arrivals(const Scenario& scenario, std::size_t k, std::uint64_t seed)
{
    std::mt19937_64 rng = frame_rng(seed, arrival_stream, k);
    const double packet = scenario.sim.packet_bits;
    std::vector<double> bits(scenario.flows.size(), 0.0);
    for (std::size_t f = 0; f < scenario.flows.size(); ++f) {
        const double mean_packets = scenario.flows[f].mean_arrival_bps * scenario.network.rb_duration_s / packet;
        if (mean_packets > 0.0) {
            std::poisson_distribution<long long> count(mean_packets);
            bits[f] = double(count(rng)) * packet;
        }
    }
    return bits;
}

FrameRequirements translate_requirements(const Scenario& scenario, const std::vector<FlowState>& state,
                                         const std::vector<double>& queue_bits, std::size_t k)
{
    const std::size_t n = scenario.flows.size();
    const Utility utility{Utility::Kind::log, scenario.sim.utility_rho_bps_per_hz * scenario.network.rb_bandwidth_hz};
    FrameRequirements reqs(n);
    for (std::size_t f = 0; f < n; ++f) {
        const FlowRequirement r =
            qosift(scenario.flows[f], state[f], queue_bits[f], k, scenario.network.rb_duration_s, utility);
        reqs.r_min[f] = r.r_min;
        reqs.r_max[f] = r.r_max;
        reqs.w[f] = r.w;
    }
    reqs.r_min_original = reqs.r_min;
    return reqs;
}

FrameProblem normalized_problem(const Scenario& scenario, const ChannelTensor& gains, const FrameRequirements& reqs)
{
    const double bw = scenario.network.rb_bandwidth_hz;
    FrameProblem problem{gains, normalized_radio(scenario.network), reqs.r_min, reqs.r_max, reqs.w};
    for (std::size_t f = 0; f < reqs.size(); ++f) {
        problem.r_min[f] /= bw;
        problem.r_max[f] /= bw;
        problem.w[f] *= bw;
    }
    problem.sigmoid_scale = bw * scenario.network.rb_duration_s;
    return problem;
}

FrameDecision decide_frame(const Scenario& scenario, const ChannelTensor& gains, FrameRequirements reqs,
                           const std::vector<double>& mean_outage_rmin, SolverTrace* first_trace)
{
    const std::size_t n = reqs.size();
    const double bw = scenario.network.rb_bandwidth_hz;
    const RadioParams radio = normalized_radio(scenario.network);
    std::vector<double> capacity(n);
    for (std::size_t f = 0; f < n; ++f) {
        capacity[f] = bw * interference_free_capacity(gains, radio, f);
    }
    std::vector<double> original(n);
    for (std::size_t f = 0; f < n; ++f) {
        original[f] = reqs.r_min_original[f] / bw;
    }

    FrameDecision out;
    bool have_solution = false;
    while (true) {
        bool over_capacity = false;
        if (scenario.sim.capacity_precheck) {
            for (std::size_t f = 0; f < n; ++f) {
                if (reqs.r_min[f] > capacity[f]) {
                    over_capacity = true;
                }
            }
        }
        if (over_capacity) {
            ++out.capacity_skips;
        } else {
            const FrameProblem problem = normalized_problem(scenario, gains, reqs);
            SolveOptions options;
            options.original_r_min = &original;
            options.trace = out.solves == 0 ? first_trace : nullptr;
            out.solution = solve_frame(problem, scenario.solver, options);
            have_solution = true;
            if (out.solves == 0) {
                out.first_solve_outer = out.solution.outer_iterations;
                out.first_solve_converged = out.solution.converged;
            }
            ++out.solves;
            if (out.solution.converged) {
                break;
            }
        }
        const bool any_requirement =
            std::any_of(reqs.r_min.begin(), reqs.r_min.end(), [](double r) { return r > 0.0; });
        if (!any_requirement) {
            // Nothing left to relax: the PHY-repaired allocation of the last solve stands.
            break;
        }
        const std::size_t flow = select_compromise_flow(reqs.r_min, mean_outage_rmin, scenario.ilm.selection);
        out.relaxations.push_back(relax(reqs, flow, scenario.ilm));
    }
    if (!have_solution) {
        throw std::logic_error("decide_frame finished without a solve");
    }
    out.reqs = reqs;
    out.rates_bps = out.solution.frame_rates;
    for (double& r : out.rates_bps) {
        r *= bw;
    }
    return out;
}

FrameDecision first_frame_decision(const Scenario& scenario, std::uint64_t seed, SolverTrace* trace)
{
    const std::size_t n = scenario.flows.size();
    const std::vector<FlowState> state(n);
    const std::vector<double> arrivals = generate_arrivals(scenario, 1, seed);
    std::vector<double> req_queue(n, 0.0);
    if (scenario.sim.requirements_queue == RequirementsQueue::post_arrival) {
        req_queue = arrivals;
    }
    const FrameRequirements reqs = translate_requirements(scenario, state, req_queue, 1);
    const ChannelTensor gains = generate_channels(scenario, 1, seed);
    return decide_frame(scenario, gains, reqs, std::vector<double>(n, 0.0), trace);
}

Allocation pf_allocation(const ChannelTensor& gains, const std::vector<double>& r_bar,
                         const std::vector<double>& backlog_bits, bool skip_empty)
{
    const Dims d = gains.dims();
    Allocation x(d);
    struct Candidate {
        double metric;
        std::size_t flow;
        std::size_t ap;
    };
    std::vector<Candidate> candidates;
    for (std::size_t j = 0; j < d.rbs; ++j) {
        candidates.clear();
        for (std::size_t f = 0; f < d.flows; ++f) {
            if (skip_empty && !(backlog_bits[f] > 0.0)) {
                continue;
            }
            for (std::size_t p = 0; p < d.aps; ++p) {
                if (gains(f, p, j) > 0.0) {
                    candidates.push_back({gains(f, p, j) / std::max(r_bar[f], 1e-9), f, p});
                }
            }
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& a, const Candidate& b) { return a.metric > b.metric; });
        std::vector<char> ap_busy(d.aps, 0);
        std::vector<char> flow_busy(d.flows, 0);
        for (const Candidate& c : candidates) {
            if (ap_busy[c.ap] || flow_busy[c.flow]) {
                continue;
            }
            ap_busy[c.ap] = 1;
            flow_busy[c.flow] = 1;
            x(c.flow, c.ap, j) = 1.0;
        }
    }
    return x;
}

RunResult run_interframe(const Scenario& scenario, std::uint64_t seed, const RunHooks& hooks)
{
    return run_loop(scenario, seed, Scheduler::qosaic, hooks,
                    [&](std::size_t k, const ChannelTensor& gains, const FrameRequirements& reqs,
                        const std::vector<FlowState>& state, const std::vector<double>&, FrameSummary& summary,
                        RunResult& run) {
                        std::vector<double> mean_outage(state.size());
                        for (std::size_t f = 0; f < state.size(); ++f) {
                            mean_outage[f] = state[f].outage.mean_rmin();
                        }
                        SolverTrace* trace = k == hooks.trace_frame ? hooks.first_frame_trace : nullptr;
                        FrameDecision decision = decide_frame(scenario, gains, reqs, mean_outage, trace);
                        summary.break_reason = decision.solution.break_reason;
                        summary.converged = decision.solution.converged;
                        summary.solves = decision.solves;
                        summary.relaxations = decision.relaxations.size();
                        summary.capacity_skips = decision.capacity_skips;
                        summary.first_solve_outer = decision.first_solve_outer;
                        summary.first_solve_converged = decision.first_solve_converged;
                        summary.objective = decision.solution.objective;
                        for (const Relaxation& r : decision.relaxations) {
                            run.ilm_events.push_back({k, r.flow, r.old_r_min, r.new_r_min});
                        }
                        return decision.rates_bps;
                    });
}

RunResult run_pf_baseline(const Scenario& scenario, std::uint64_t seed, const RunHooks& hooks)
{
    const RadioParams radio = RadioParams::from_network(scenario.network);
    return run_loop(scenario, seed, Scheduler::pf, hooks,
                    [&](std::size_t, const ChannelTensor& gains, const FrameRequirements& reqs,
                        const std::vector<FlowState>& state, const std::vector<double>& queue,
                        FrameSummary& summary, RunResult&) {
                        std::vector<double> r_bar(state.size());
                        for (std::size_t f = 0; f < state.size(); ++f) {
                            r_bar[f] = state[f].r_bar;
                        }
                        const Allocation x = pf_allocation(gains, r_bar, queue, scenario.sim.pf_skip_empty_queues);
                        std::vector<double> rates = frame_rates(gains, x, radio);
                        summary.converged = true;
                        summary.break_reason = BreakReason::feasible_only;
                        summary.first_solve_converged = true;
                        const FrameProblem problem = normalized_problem(scenario, gains, reqs);
                        summary.objective = objective(problem, x, effective_sharpness(problem, scenario.solver));
                        return rates;
                    });
}

RunResult run_scheduler(Scheduler scheduler, const Scenario& scenario, std::uint64_t seed, const RunHooks& hooks)
{
    return scheduler == Scheduler::qosaic ? run_interframe(scenario, seed, hooks)
                                          : run_pf_baseline(scenario, seed, hooks);
}

double amended_output(double mean_output_bps, double mean_o_rmin, double residual_bps)
{
    return mean_output_bps + (1.0 - mean_o_rmin) * residual_bps;
}

std::vector<FlowTotals> summarize(const Scenario& scenario, const RunResult& run)
{
    const std::size_t n = scenario.flows.size();
    const double tb = scenario.network.rb_duration_s;
    const double frames = double(run.frames.size());
    std::vector<FlowTotals> totals(n);
    for (std::size_t f = 0; f < n; ++f) {
        FlowTotals& t = totals[f];
        for (const auto& frame : run.frames) {
            t.arrived_bits += frame[f].arrivals_bits;
            t.served_bits += frame[f].served_bps * tb;
        }
        if (frames == 0.0) {
            continue;
        }
        const FlowState& st = run.final_state.at(f);
        t.final_queue_bits = st.q;
        t.mean_input_bps = t.arrived_bits / (frames * tb);
        t.mean_output_bps = t.served_bits / (frames * tb);
        t.residual_bps = st.q / (frames * tb);
        t.mean_O_rmin = st.outage.mean_rmin();
        t.mean_O_rbar_min = st.outage.mean_rbar_min();
        t.mean_O_dbar_max = st.outage.mean_dbar_max();
        t.mean_o_rmin = st.outage.mean_rmin_indicator();
        t.amended_bps = amended_output(t.mean_output_bps, t.mean_o_rmin, t.residual_bps);
    }
    return totals;
}

std::vector<SweepRun> load_sweep(const Scenario& scenario, const std::vector<Scheduler>& schedulers,
                                 const std::function<void(const SweepRun&)>& on_run,
                                 const std::atomic<bool>* stop)
{
    std::vector<SweepRun> runs;
    RunHooks hooks;
    hooks.stop = stop;
    for (std::size_t i = 0; i < scenario.sweep.total_loads_bps.size(); ++i) {
        const double load = scenario.sweep.total_loads_bps[i];
        const Scenario loaded = with_total_load(scenario, load);
        for (std::uint64_t seed : scenario.sim.seeds) {
            for (Scheduler s : schedulers) {
                if (stop && stop->load()) {
                    return runs;
                }
                SweepRun run{i, load, run_scheduler(s, loaded, seed, hooks)};
                if (run.result.interrupted) {
                    return runs;
                }
                if (on_run) {
                    on_run(run);
                }
                runs.push_back(std::move(run));
            }
        }
    }
    return runs;
}

} // namespace qosaic
