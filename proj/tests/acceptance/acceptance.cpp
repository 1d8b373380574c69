// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracle/brute_force.hpp"
#include "qosaic/ilm.hpp"
#include "qosaic/output.hpp"
#include "qosaic/qosift.hpp"
#include "qosaic/radio.hpp"
#include "qosaic/sim.hpp"

using namespace qosaic;

namespace {

// P1
constexpr std::size_t kGradientPoints = 120;
constexpr std::size_t kSigmoidPoints = 120;
constexpr double kFdRelTol = 1e-4;
constexpr double kFdAbsFloor = 1e-6;
constexpr double kP1Seconds = 10.0;

// P2
constexpr std::size_t kFuzzInstances = 500;
constexpr double kFuzzSigmoidScale = 180.0; // W_b T_b of the shipped presets
constexpr double kQualityRatio = 0.8;
constexpr double kQualityShare = 0.9;
constexpr double kP2Seconds = 120.0;

// P4
constexpr std::size_t kUnderloadPoints = 3;
constexpr double kP4Seconds = 600.0;

// P5
constexpr std::size_t kConvergedWithin = 100;
constexpr double kConvergedShare = 0.9;

// P6
constexpr std::size_t kMidOverloadIndex = 9; // 0-based: 3.0 Mbps, between saturation and the top load
constexpr double kDominanceRatio = 1.5;
constexpr double kOutageSlack = 1e-12;
constexpr double kP6Seconds = 1800.0;

// P7
constexpr double kFlatBand = 0.05;

// P8
constexpr std::size_t kForcedInstances = 30;
constexpr std::size_t kLookaheadCases = 300;
constexpr double kLookaheadShare = 0.9;

// P9
constexpr double kRoundOff = 1e-9;

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class... Args>
std::string fmt(const char* pattern, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, double(args)...);
    return buf;
}

double rel_error(double analytic, double numeric)
{
    return std::abs(analytic - numeric) / std::max(std::abs(numeric), kFdAbsFloor);
}

Verdict p1_gradients()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(101);
    std::lognormal_distribution<double> gain(0.0, 1.0);
    std::uniform_real_distribution<double> interior(0.05, 0.95);
    const RadioParams radio;
    const Dims d{3, 2, 3};
    double worst_grad = 0.0;
    std::size_t grad_checks = 0;
    for (std::size_t t = 0; t < kGradientPoints; ++t) {
        Tensor3 g(d);
        Tensor3 x(d);
        for (double& v : g.data()) {
            v = gain(rng);
        }
        for (double& v : x.data()) {
            v = interior(rng);
        }
        const std::size_t flow = rng() % d.flows;
        const std::size_t ap = rng() % d.aps;
        const std::size_t rb = rng() % d.rbs;
        const std::vector<double> analytic = rate_gradient(g, x, radio, flow, ap, rb);
        for (std::size_t phi = 0; phi < d.flows; ++phi) {
            const auto rate_of = [&](double value) {
                Tensor3 y = x;
                y(flow, ap, rb) = value;
                return frame_rates(g, y, radio)[phi];
            };
            const double numeric = oracle::central_difference(rate_of, x(flow, ap, rb), 1e-6);
            worst_grad = std::max(worst_grad, rel_error(analytic[phi], numeric));
            ++grad_checks;
        }
    }

    std::uniform_real_distribution<double> rate(0.0, 20.0);
    std::uniform_real_distribution<double> cap(1.0, 10.0);
    std::uniform_real_distribution<double> sharp(0.1, 20.0);
    double worst_sigmoid = 0.0;
    for (std::size_t t = 0; t < kSigmoidPoints; ++t) {
        const double r = rate(rng);
        const double r_max = cap(rng);
        const double nu = sharp(rng);
        const double numeric = oracle::central_difference(
            [&](double v) { return sigmoid(v, r_max, nu).value; }, r, 1e-6);
        worst_sigmoid = std::max(worst_sigmoid, rel_error(sigmoid(r, r_max, nu).slope, numeric));
    }
    const double elapsed = seconds_since(start);
    Verdict v;
    v.pass = worst_grad < kFdRelTol && worst_sigmoid < kFdRelTol && elapsed < kP1Seconds;
    v.detail = fmt("rate gradient %.0f entries max rel err %.2e; sigmoid slope max rel err %.2e; %.2f s",
                   double(grad_checks), worst_grad, worst_sigmoid, elapsed);
    return v;
}

struct FuzzTally {
    std::size_t converged = 0;
    std::size_t violations = 0;
    std::size_t quality_n = 0;
    std::size_t quality_ok = 0;
};

void fuzz(std::mt19937_64& rng, bool all_be, FuzzTally& tally)
{
    std::uniform_int_distribution<int> dim(1, 2);
    std::lognormal_distribution<double> gain(1.0, 1.5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const SolverParams params;
    for (std::size_t t = 0; t < kFuzzInstances; ++t) {
        const Dims d{std::size_t(dim(rng)), std::size_t(dim(rng)), std::size_t(dim(rng))};
        FrameProblem p{Tensor3(d), RadioParams{}, std::vector<double>(d.flows), std::vector<double>(d.flows),
                       std::vector<double>(d.flows)};
        for (double& g : p.gains.data()) {
            g = gain(rng);
        }
        for (std::size_t f = 0; f < d.flows; ++f) {
            p.w[f] = 0.2 + u(rng);
            p.r_max[f] = 1.0 + 10.0 * u(rng);
        }
        p.sigmoid_scale = kFuzzSigmoidScale;
        if (!all_be) {
            for (std::size_t f = 0; f < d.flows; ++f) {
                if (u(rng) < 0.6) {
                    p.r_min[f] = 3.0 * u(rng);
                }
            }
        }
        const double nu = effective_sharpness(p, params);
        const FrameSolution sol = solve_frame(p, params);
        if (!sol.converged) {
            continue;
        }
        ++tally.converged;
        const std::vector<double> r = oracle::rates(p.gains, sol.allocation, 1.0, 1.0, 1.0);
        tally.violations += !oracle::check(sol.allocation, r, p.r_min).all();
        if (all_be) {
            const oracle::BruteForceResult bf = oracle::brute_force_frame(p, nu);
            const double empty = oracle::objective(p, std::vector<double>(d.flows, 0.0), nu);
            ++tally.quality_n;
            // Objectives are non-positive, so the ratio is taken on the gain over the empty allocation.
            tally.quality_ok +=
                oracle::objective(p, r, nu) - empty >= kQualityRatio * (bf.best_objective - empty) - 1e-12;
        }
    }
}

Verdict p2_soundness()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(7);
    FuzzTally mixed;
    FuzzTally be;
    fuzz(rng, false, mixed);
    fuzz(rng, true, be);
    const double share = be.quality_n ? double(be.quality_ok) / double(be.quality_n) : 0.0;
    const double elapsed = seconds_since(start);
    Verdict v;
    v.pass = mixed.violations == 0 && be.violations == 0 && share >= kQualityShare && elapsed < kP2Seconds;
    v.detail = fmt("%.0f converged solves, %.0f violations; all-BE gain >= 0.8 x optimum in %.1f%%; %.1f s",
                   double(mixed.converged + be.converged), double(mixed.violations + be.violations),
                   100.0 * share, elapsed);
    return v;
}

struct Conservation {
    std::size_t runs = 0;
    std::size_t broken = 0;
};

void check_conservation(const RunResult& run, Conservation& c)
{
    ++c.runs;
    for (const FlowTotals& t : run.totals) {
        if (t.arrived_bits != t.served_bits + t.final_queue_bits) {
            ++c.broken;
            return;
        }
    }
}

double ds_outage(const Scenario& s, const RunResult& run)
{
    double worst = 0.0;
    for (std::size_t f = 0; f < run.totals.size(); ++f) {
        if (s.flows[f].qos == QosClass::delay_sensitive) {
            worst = std::max(worst, run.totals[f].mean_O_dbar_max);
        }
    }
    return worst;
}

double rs_outage(const Scenario& s, const RunResult& run)
{
    double worst = 0.0;
    for (std::size_t f = 0; f < run.totals.size(); ++f) {
        if (s.flows[f].qos == QosClass::rate_sensitive) {
            worst = std::max(worst, run.totals[f].mean_O_rbar_min);
        }
    }
    return worst;
}

bool underloaded(const RunResult& run)
{
    return std::all_of(run.totals.begin(), run.totals.end(), [](const FlowTotals& t) {
        return t.mean_O_rmin == 0.0 && t.mean_O_rbar_min == 0.0 && t.mean_O_dbar_max == 0.0;
    });
}

Verdict p4_underload(const Scenario& be_ds, const std::vector<SweepRun>& sweep, double seconds)
{
    double worst_ds = 0.0;
    double worst_rs = 0.0;
    std::size_t runs = 0;
    for (const SweepRun& r : sweep) {
        if (r.result.scheduler == Scheduler::qosaic && r.load_index < kUnderloadPoints) {
            worst_ds = std::max(worst_ds, ds_outage(be_ds, r.result));
            worst_rs = std::max(worst_rs, rs_outage(be_ds, r.result));
            ++runs;
        }
    }
    Verdict v;
    v.pass = worst_ds == 0.0 && worst_rs == 0.0 && runs == kUnderloadPoints * be_ds.sim.seeds.size() &&
             seconds < kP4Seconds;
    v.detail = fmt("%.0f runs at the 3 lowest loads; worst mean DS outage %.3g, RS outage %.3g; %.0f s",
                   double(runs), worst_ds, worst_rs, seconds);
    return v;
}

Verdict p5_convergence(const Scenario& be_ds, const std::vector<SweepRun>& sweep)
{
    std::size_t frames = 0;
    std::size_t fast = 0;
    std::size_t over_cap = 0;
    std::size_t unhanded = 0;
    std::size_t no_requirement = 0;
    for (const SweepRun& r : sweep) {
        if (r.result.scheduler != Scheduler::qosaic) {
            continue;
        }
        const bool counted = r.total_load_bps > 0.0 && underloaded(r.result);
        for (const FrameSummary& s : r.result.summaries) {
            over_cap += s.first_solve_outer > be_ds.solver.outer_max;
            if (!s.first_solve_converged && s.solves > 0 && s.relaxations == 0) {
                const auto& flows = r.result.frames[s.frame - 1];
                const bool constrained = std::any_of(flows.begin(), flows.end(),
                                                     [](const FlowFrameRecord& f) { return f.r_min_bps > 0.0; });
                // With a requirement in place the capped solve must go to ILM; without one there is
                // nothing to relax and the frame keeps the repaired last iterate.
                (constrained ? unhanded : no_requirement) += 1;
            }
            if (counted) {
                ++frames;
                fast += s.first_solve_converged && s.first_solve_outer <= kConvergedWithin;
            }
        }
    }
    const double share = frames ? double(fast) / double(frames) : 0.0;
    Verdict v;
    v.pass = frames > 0 && share >= kConvergedShare && over_cap == 0 && unhanded == 0;
    v.detail = fmt("%.1f%% of %.0f underloaded frames break feasibly within 100 outer iterations; "
                   "%.0f solves past the cap; capped solves with requirements left unrelaxed %.0f, "
                   "capped solves with nothing to relax %.0f",
                   100.0 * share, double(frames), double(over_cap), double(unhanded), double(no_requirement));
    return v;
}

Verdict p6_dominance(const std::vector<SweepSummaryRow>& rows, double sweep_seconds)
{
    std::map<std::size_t, const SweepSummaryRow*> q;
    std::map<std::size_t, const SweepSummaryRow*> pf;
    for (const SweepSummaryRow& r : rows) {
        (r.scheduler == Scheduler::qosaic ? q : pf)[r.load_index - 1] = &r;
    }
    std::size_t worse = 0;
    for (const auto& [li, row] : q) {
        worse += row->O_dbar_max_ds > pf.at(li)->O_dbar_max_ds + kOutageSlack;
    }
    const double ratio = q.at(kMidOverloadIndex)->amended_ds_bps / pf.at(kMidOverloadIndex)->amended_ds_bps;
    Verdict v;
    v.pass = worse == 0 && ratio >= kDominanceRatio && sweep_seconds < kP6Seconds;
    v.detail = fmt("QoSaIC DS outage above PF at %.0f of 12 loads; DS amended ratio at 3.0 Mbps %.2f "
                   "(need 1.5); sweep %.0f s",
                   double(worse), ratio, sweep_seconds);
    std::string ratios;
    for (std::size_t li = 0; li < q.size(); ++li) {
        const double den = pf.at(li)->amended_ds_bps;
        ratios += (li ? " " : "") + fmt("%.2f", den > 0.0 ? q.at(li)->amended_ds_bps / den : 0.0);
    }
    v.detail += "; ratios by load: " + ratios;
    return v;
}

Verdict p7_saturation(const std::vector<SweepSummaryRow>& rows)
{
    std::vector<double> curve;
    for (const SweepSummaryRow& r : rows) {
        if (r.scheduler == Scheduler::qosaic) {
            curve.push_back(r.amended_ds_bps);
        }
    }
    const double peak = *std::max_element(curve.begin(), curve.end());
    std::size_t knee = 0;
    while (curve[knee] < (1.0 - kFlatBand) * peak) {
        ++knee;
    }
    bool rising = true;
    for (std::size_t i = 1; i <= knee; ++i) {
        rising = rising && curve[i] >= curve[i - 1];
    }
    bool flat = true;
    for (std::size_t i = knee; i < curve.size(); ++i) {
        flat = flat && curve[i] >= (1.0 - kFlatBand) * peak;
    }
    Verdict v;
    v.pass = rising && flat && knee + 1 < curve.size();
    v.detail = fmt("knee at load %.0f, peak %.0f bps", double(knee + 1), peak) + "; rising " +
               (rising ? "yes" : "no") + ", flat " + (flat ? "yes" : "no");
    std::string pts;
    for (double c : curve) {
        pts += (pts.empty() ? "" : " ") + fmt("%.0f", c / 1e3);
    }
    v.detail += "; kbps " + pts;
    return v;
}

Verdict p8_ilm()
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    Scenario tiny = with_total_load(make_preset("tiny"), 0.3e6);
    tiny.sim.capacity_precheck = false;
    std::size_t forced = 0;
    std::size_t triggered = 0;
    std::size_t phy_ok = 0;
    for (std::uint64_t seed = 1; forced < kForcedInstances; ++seed) {
        const ChannelTensor g = generate_channels(tiny, 1, seed);
        FrameRequirements reqs(3);
        for (std::size_t f = 0; f < 3; ++f) {
            reqs.r_min[f] = (0.3 + 0.7 * u(rng)) * interference_free_capacity(g, RadioParams::from_network(tiny.network), f);
            reqs.r_max[f] = 2.0 * reqs.r_min[f];
            reqs.w[f] = 1e-6;
        }
        reqs.r_min_original = reqs.r_min;
        if (oracle::brute_force_frame(normalized_problem(tiny, g, reqs), 1.0).best) {
            continue;
        }
        ++forced;
        const FrameDecision d = decide_frame(tiny, g, reqs, {0.0, 0.0, 0.0});
        triggered += !d.relaxations.empty();
        const std::vector<double> r = oracle::rates(g, d.solution.allocation, 1.0, 1.0, 1.0);
        const oracle::ConstraintCheck c = oracle::check(d.solution.allocation, r, std::vector<double>(3, 0.0));
        phy_ok += c.integer && c.phy1 && c.phy2;
    }

    // Compromise selection against the exhaustive one-step lookahead.
    std::lognormal_distribution<double> gain(1.0, 1.0);
    std::size_t cases = 0;
    std::size_t agree = 0;
    while (cases < kLookaheadCases) {
        FrameProblem p{Tensor3({3, 2, 2}), RadioParams{}, {0.0, 0.0, 0.0}, {50.0, 50.0, 50.0}, {1.0, 1.0, 1.0}};
        for (double& v : p.gains.data()) {
            v = gain(rng);
        }
        for (std::size_t f = 0; f < 3; ++f) {
            p.r_min[f] = (0.2 + 0.6 * u(rng)) * interference_free_capacity(p.gains, p.radio, f);
        }
        if (oracle::brute_force_frame(p, 0.1).best) {
            continue;
        }
        std::vector<double> mean(3);
        for (double& m : mean) {
            m = 0.05 + 0.55 * u(rng);
        }
        const std::size_t k = 2 + rng() % 49;
        const std::optional<std::size_t> best = oracle::lookahead_compromise(p, mean, k);
        if (!best) {
            continue;
        }
        ++cases;
        agree += select_compromise_flow(p.r_min, mean) == *best;
    }
    const double share = double(agree) / double(cases);
    Verdict v;
    v.pass = triggered == forced && phy_ok == forced && share >= kLookaheadShare;
    v.detail = fmt("ILM triggered on %.0f/%.0f forced instances, PHY-feasible %.0f; "
                   "argmax matches lookahead on %.1f%% of 300 cases",
                   double(triggered), double(forced), double(phy_ok), 100.0 * share);
    return v;
}

Verdict p9_identities()
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> arrivals(1.0 / 400.0);
    const double tb = 1e-3;
    const double target = 3e5;
    const double dmax = 20.0 * tb;
    std::size_t rate_checks = 0;
    std::size_t rate_bad = 0;
    std::size_t delay_checks = 0;
    std::size_t delay_bad = 0;
    for (int trial = 0; trial < 50; ++trial) {
        double r_bar = 0.0;
        for (std::size_t k = 1; k <= 200; ++k) {
            const double r = translate_rs(target, std::numeric_limits<double>::infinity(), r_bar, k).r_min1 +
                             5e4 * u(rng) * (trial % 2);
            const double h = forgetting_factor(k);
            r_bar = (1.0 - h) * r_bar + h * r;
            ++rate_checks;
            rate_bad += r_bar < target * (1.0 - kRoundOff);
        }

        double q = 0.0;
        double q_bar = 0.0;
        double q_prev2_bar = 0.0;
        double rd_bar = 0.0;
        for (std::size_t k = 1; k <= 200; ++k) {
            q += arrivals(rng);
            const ZetaCoefficients z = zeta(q_prev2_bar, q, rd_bar, k, tb);
            const double r_min2 = translate_ds(z, dmax);
            const double r = std::min(q / tb, r_min2 * (1.0 + u(rng) * (trial % 2)));
            if (r >= r_min2 && z.z3 + z.z4 * r > 0.0) {
                ++delay_checks;
                delay_bad += mean_delay_estimate(z, r) > dmax * (1.0 + kRoundOff);
            }
            q -= r * tb;
            const double h = forgetting_factor(k);
            q_prev2_bar = q_bar;
            q_bar = (1.0 - h) * q_bar + h * q;
            rd_bar = (1.0 - h) * rd_bar + h * r;
        }
    }
    Verdict v;
    v.pass = rate_bad == 0 && delay_bad == 0 && delay_checks > 0;
    v.detail = fmt("mean-rate bound held %.0f/%.0f, delay estimate bound held %.0f/%.0f",
                   double(rate_checks - rate_bad), double(rate_checks), double(delay_checks - delay_bad),
                   double(delay_checks));
    return v;
}

} // namespace

int main()
{
    std::map<std::string, Verdict> verdicts;
    const auto report = [&](const std::string& id, const Verdict& v) {
        verdicts[id] = v;
        std::printf("%s %s %s\n", id.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
    };

    report("P1", p1_gradients());
    report("P2", p2_soundness());

    // One 12-point sweep feeds P3 through P7.
    const Scenario be_ds = make_preset("be_ds");
    const auto sweep_start = Clock::now();
    auto last = sweep_start;
    double underload_seconds = 0.0;
    const std::vector<SweepRun> sweep =
        load_sweep(be_ds, {Scheduler::qosaic, Scheduler::pf}, [&](const SweepRun& r) {
            if (r.load_index < kUnderloadPoints && r.result.scheduler == Scheduler::qosaic) {
                underload_seconds += seconds_since(last);
            }
            last = Clock::now();
        });
    const double sweep_seconds = seconds_since(sweep_start);
    const std::vector<SweepSummaryRow> rows = summarize_sweep(be_ds, sweep);
    Conservation cons;
    for (const SweepRun& r : sweep) {
        check_conservation(r.result, cons);
    }

    const Verdict p4 = p4_underload(be_ds, sweep, underload_seconds);

    Verdict p3;
    p3.pass = cons.broken == 0 && cons.runs > 0;
    p3.detail = fmt("%.0f runs, %.0f with arrivals != served + backlog", double(cons.runs), double(cons.broken));
    report("P3", p3);
    report("P4", p4);
    report("P5", p5_convergence(be_ds, sweep));
    report("P6", p6_dominance(rows, sweep_seconds));
    report("P7", p7_saturation(rows));
    report("P8", p8_ilm());
    report("P9", p9_identities());

    const bool all = std::all_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second.pass; });
    return all ? 0 : 1;
}
