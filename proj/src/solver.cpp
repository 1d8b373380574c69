#include "qosaic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

#include "qosaic/qosift.hpp"

namespace qosaic {

namespace {

constexpr double ln2 = std::numbers::ln2;

// Margins this close to zero are treated as exactly met; summing relaxed
// entries that should total 1 leaves round-off of this order.
constexpr double margin_round_off = 1e-12;

// Nothing to send and nothing owed: frugality (r <= r_max = 0) holds only
// with every entry at zero, so these flows are kept off.
bool idle(const FrameProblem& problem, std::size_t flow)
{
    return !(problem.r_max[flow] > 0.0) && !(problem.r_min[flow] > 0.0);
}

std::vector<double> weighted_slopes(const FrameProblem& problem, const std::vector<double>& rates,
                                    const DualState& duals, double nu)
{
    std::vector<double> a(rates.size());
    for (std::size_t f = 0; f < rates.size(); ++f) {
        a[f] = problem.w[f] * sigmoid(rates[f], problem.r_max[f], nu).slope + duals.s[f];
    }
    return a;
}

// Incremental bookkeeping for one fixed-point sweep: per-RB AP loads, received
// power, link interference, link efficiencies, flow rates and rate weights.
class SweepState {
public:
    SweepState(const FrameProblem& problem, const Tensor3& x, const DualState& duals, double nu)
        : problem_(problem), duals_(duals), nu_(nu), d_(x.dims()), load_(d_.aps * d_.rbs, 0.0),
          received_(d_.flows * d_.rbs, 0.0), interf_(d_), eff_(d_), rates_(d_.flows, 0.0)
    {
        for (std::size_t j = 0; j < d_.rbs; ++j) {
            for (std::size_t p = 0; p < d_.aps; ++p) {
                double sum = 0.0;
                for (std::size_t f = 0; f < d_.flows; ++f) {
                    sum += x(f, p, j);
                }
                load_[j * d_.aps + p] = sum;
            }
            for (std::size_t f = 0; f < d_.flows; ++f) {
                double sum = 0.0;
                for (std::size_t p = 0; p < d_.aps; ++p) {
                    sum += problem_.gains(f, p, j) * load_[j * d_.aps + p];
                }
                received_[j * d_.flows + f] = sum;
            }
            refresh_rb(x, j);
        }
        a_ = weighted_slopes(problem_, rates_, duals_, nu_);
    }

    // Fixed-point map of one variable given the current state.
    double proposal(const Tensor3& x, std::size_t flow, std::size_t ap, std::size_t rb, double floor) const
    {
        const double g = problem_.gains(flow, ap, rb);
        if (!(g > 0.0) || idle(problem_, flow)) {
            return 0.0;
        }
        const RadioParams& radio = problem_.radio;
        double cost = 0.0; // -(dagger + ddagger)
        for (std::size_t p = 0; p < d_.aps; ++p) {
            for (std::size_t f = 0; f < d_.flows; ++f) {
                const double xv = x(f, p, rb);
                if (xv <= 0.0 || (f == flow && p == ap)) {
                    continue;
                }
                const double gv = problem_.gains(f, p, rb);
                const double ni = radio.noise + interf_(f, p, rb);
                const double c = a_[f] * radio.bandwidth * xv * gv / (ln2 * ni * (radio.sinr_gap * ni + gv * xv));
                cost += c * problem_.gains(f, ap, rb);
            }
        }
        const double a = a_[flow] * radio.bandwidth;
        if (!(a > 0.0)) {
            return 0.0;
        }
        const double denom = ln2 * (cost + duals_.u_at(ap, rb) + duals_.v_at(flow, rb) + floor);
        const double first = denom > 0.0 ? a / denom : std::numeric_limits<double>::infinity();
        return std::max(0.0, first - radio.sinr_gap * (radio.noise + interf_(flow, ap, rb)) / g);
    }

    void apply(Tensor3& x, std::size_t flow, std::size_t ap, std::size_t rb, double value)
    {
        const double delta = value - x(flow, ap, rb);
        if (delta == 0.0) {
            return;
        }
        x(flow, ap, rb) = value;
        load_[rb * d_.aps + ap] += delta;
        for (std::size_t f = 0; f < d_.flows; ++f) {
            received_[rb * d_.flows + f] += problem_.gains(f, ap, rb) * delta;
        }
        refresh_rb(x, rb);
        a_ = weighted_slopes(problem_, rates_, duals_, nu_);
    }

private:
    void refresh_rb(const Tensor3& x, std::size_t rb)
    {
        const RadioParams& radio = problem_.radio;
        for (std::size_t p = 0; p < d_.aps; ++p) {
            for (std::size_t f = 0; f < d_.flows; ++f) {
                const double xv = x(f, p, rb);
                const double gv = problem_.gains(f, p, rb);
                const double i = std::max(0.0, received_[rb * d_.flows + f] - gv * xv);
                interf_(f, p, rb) = i;
                const double b =
                    xv > 0.0 ? std::log2(1.0 + xv * gv / (radio.sinr_gap * (radio.noise + i))) : 0.0;
                rates_[f] += radio.bandwidth * (b - eff_(f, p, rb));
                eff_(f, p, rb) = b;
            }
        }
    }

    const FrameProblem& problem_;
    const DualState& duals_;
    double nu_;
    Dims d_;
    std::vector<double> load_;
    std::vector<double> received_;
    Tensor3 interf_;
    Tensor3 eff_;
    std::vector<double> rates_;
    std::vector<double> a_;
};

} // namespace

double effective_sharpness(const FrameProblem& problem, const SolverParams& params)
{
    return params.sigmoid_sharpness * problem.sigmoid_scale;
}

std::vector<std::string> validate_problem(const FrameProblem& problem)
{
    std::vector<std::string> errors;
    const Dims d = problem.dims();
    if (d.flows == 0 || d.aps == 0 || d.rbs == 0) {
        errors.emplace_back("empty problem dimensions");
    }
    if (problem.r_min.size() != d.flows || problem.r_max.size() != d.flows || problem.w.size() != d.flows) {
        errors.emplace_back("dimension mismatch between gains and requirements");
        return errors;
    }
    for (double g : problem.gains.data()) {
        if (!(std::isfinite(g) && g >= 0.0)) {
            errors.emplace_back("gains must be finite and >= 0");
            break;
        }
    }
    for (std::size_t f = 0; f < d.flows; ++f) {
        if (!(problem.r_min[f] >= 0.0 && std::isfinite(problem.r_min[f]))) {
            errors.push_back("r_min of flow " + std::to_string(f) + " must be finite and >= 0");
        }
        if (!(problem.r_max[f] >= 0.0 && std::isfinite(problem.r_max[f]))) {
            errors.push_back("r_max of flow " + std::to_string(f) + " must be finite and >= 0");
        }
        if (!(problem.w[f] >= 0.0 && std::isfinite(problem.w[f]))) {
            errors.push_back("w of flow " + std::to_string(f) + " must be finite and >= 0");
        }
    }
    if (!(problem.sigmoid_scale > 0.0 && std::isfinite(problem.sigmoid_scale))) {
        errors.emplace_back("sigmoid_scale must be finite and > 0");
    }
    if (!(problem.radio.noise > 0.0) || !(problem.radio.bandwidth > 0.0) || !(problem.radio.sinr_gap >= 1.0)) {
        errors.emplace_back("radio parameters out of range");
    }
    return errors;
}

double objective_from_rates(const FrameProblem& problem, const std::vector<double>& rates, double nu)
{
    double sum = 0.0;
    for (std::size_t f = 0; f < rates.size(); ++f) {
        sum += problem.w[f] * sigmoid(rates[f], problem.r_max[f], nu).value;
    }
    return sum;
}

double objective(const FrameProblem& problem, const Tensor3& x, double nu)
{
    return objective_from_rates(problem, frame_rates(problem.gains, x, problem.radio), nu);
}

double lagrangian(const FrameProblem& problem, const Tensor3& x, const DualState& duals, double nu)
{
    const Dims d = x.dims();
    const std::vector<double> rates = frame_rates(problem.gains, x, problem.radio);
    double value = 0.0;
    for (std::size_t f = 0; f < d.flows; ++f) {
        value += problem.w[f] * sigmoid(rates[f], problem.r_max[f], nu).value;
        value += duals.s[f] * (rates[f] - problem.r_min[f]);
    }
    for (std::size_t j = 0; j < d.rbs; ++j) {
        for (std::size_t p = 0; p < d.aps; ++p) {
            double load = 0.0;
            for (std::size_t f = 0; f < d.flows; ++f) {
                load += x(f, p, j);
            }
            value -= duals.u_at(p, j) * (load - 1.0);
        }
        for (std::size_t f = 0; f < d.flows; ++f) {
            double load = 0.0;
            for (std::size_t p = 0; p < d.aps; ++p) {
                load += x(f, p, j);
            }
            value -= duals.v_at(f, j) * (load - 1.0);
        }
    }
    return value;
}

PrimalComponents primal_components(const FrameProblem& problem, const Tensor3& x, const DualState& duals,
                                   double nu, std::size_t flow, std::size_t ap, std::size_t rb)
{
    const Dims d = x.dims();
    const RadioParams& radio = problem.radio;
    const Tensor3 total = interference(problem.gains, x).total;
    const std::vector<double> a =
        weighted_slopes(problem, frame_rates(problem.gains, x, radio), duals, nu);

    PrimalComponents out;
    const double g = problem.gains(flow, ap, rb);
    out.upsilon = a[flow] * radio.bandwidth * g /
                  (ln2 * (radio.sinr_gap * (radio.noise + total(flow, ap, rb)) + g * x(flow, ap, rb)));
    for (std::size_t p = 0; p < d.aps; ++p) {
        for (std::size_t f = 0; f < d.flows; ++f) {
            if (f == flow && p == ap) {
                continue;
            }
            const double xv = x(f, p, rb);
            const double gv = problem.gains(f, p, rb);
            const double ni = radio.noise + total(f, p, rb);
            const double term = -a[f] * radio.bandwidth * xv * gv * problem.gains(f, ap, rb) /
                                (ln2 * ni * (radio.sinr_gap * ni + gv * xv));
            (p == ap ? out.ddagger : out.dagger) += term;
        }
    }
    return out;
}

double primal_update(const FrameProblem& problem, Tensor3& x, const DualState& duals, const SolverParams& params)
{
    const Dims d = x.dims();
    SweepState state(problem, x, duals, effective_sharpness(problem, params));
    double max_change = 0.0;
    auto settle = [&](double old_value, double value) {
        // Convergence is judged on what the interface projection would keep.
        max_change = std::max(max_change, std::abs(std::min(1.0, value) - std::min(1.0, old_value)));
        return params.project_in_sweep ? std::min(1.0, value) : value;
    };

    if (params.sweep == SweepOrder::jacobi) {
        Tensor3 next = x;
        for (std::size_t j = 0; j < d.rbs; ++j) {
            for (std::size_t p = 0; p < d.aps; ++p) {
                for (std::size_t f = 0; f < d.flows; ++f) {
                    next(f, p, j) = settle(x(f, p, j), state.proposal(x, f, p, j, params.denom_floor));
                }
            }
        }
        x = std::move(next);
        return max_change;
    }

    for (std::size_t j = 0; j < d.rbs; ++j) {
        for (std::size_t p = 0; p < d.aps; ++p) {
            for (std::size_t f = 0; f < d.flows; ++f) {
                const double value = settle(x(f, p, j), state.proposal(x, f, p, j, params.denom_floor));
                state.apply(x, f, p, j, value);
            }
        }
    }
    return max_change;
}

double inner_tolerance(std::size_t i_outer, const SolverParams& params)
{
    return params.eps_inner_limit +
           (params.eps_inner_first - params.eps_inner_limit) * std::pow(params.inner_contraction, 1.0 - double(i_outer));
}

double outer_tolerance(std::size_t i_outer, double eps_outer_first, const SolverParams& params)
{
    const double block = double(params.outer_max) / 5.0;
    return eps_outer_first * std::pow(params.outer_expansion, std::floor(double(i_outer) / block));
}

InnerResult inner_loop(const FrameProblem& problem, Tensor3& x, const DualState& duals, const SolverParams& params,
                       std::size_t i_outer)
{
    const double eps = inner_tolerance(i_outer, params);
    InnerResult out;
    while (out.sweeps < params.inner_max) {
        out.last_change = primal_update(problem, x, duals, params);
        ++out.sweeps;
        if (out.last_change < eps) {
            break;
        }
    }
    return out;
}

void interface_projection(Tensor3& x)
{
    for (double& v : x.data()) {
        v = std::min(1.0, v);
    }
}

double update_multiplier(double m, double margin, double ref, std::size_t i_outer, const SolverParams& params)
{
    if (std::abs(margin) <= margin_round_off * std::max(1.0, ref)) {
        return m;
    }
    const double ratio = 1.0 + margin / ref;
    const double magnitude = ratio > 0.0 ? std::min(std::abs(std::log(ratio)), params.log_cap) : params.log_cap;
    const double e = magnitude / std::pow(double(i_outer), params.step_shrink);
    if (margin < 0.0) {
        return std::min(params.multiplier_cap, std::pow(params.dual_base, e) * m + params.jump_start);
    }
    return std::min(params.multiplier_cap, std::pow(params.dual_base, -e) * m);
}

void dual_update(DualState& duals, const Tensor3& x, const std::vector<double>& r_min,
                 const std::vector<double>& rates, std::size_t i_outer, const SolverParams& params)
{
    const Dims d = x.dims();
    for (std::size_t f = 0; f < d.flows; ++f) {
        duals.s[f] = r_min[f] > 0.0 ? update_multiplier(duals.s[f], rates[f] - r_min[f], r_min[f], i_outer, params)
                                    : 0.0;
    }
    for (std::size_t j = 0; j < d.rbs; ++j) {
        for (std::size_t p = 0; p < d.aps; ++p) {
            if (params.phy1_check_at_break_only) {
                duals.u_at(p, j) = 0.0;
                continue;
            }
            double load = 0.0;
            for (std::size_t f = 0; f < d.flows; ++f) {
                load += x(f, p, j);
            }
            duals.u_at(p, j) = update_multiplier(duals.u_at(p, j), 1.0 - load, 1.0, i_outer, params);
        }
        for (std::size_t f = 0; f < d.flows; ++f) {
            double load = 0.0;
            for (std::size_t p = 0; p < d.aps; ++p) {
                load += x(f, p, j);
            }
            duals.v_at(f, j) = update_multiplier(duals.v_at(f, j), 1.0 - load, 1.0, i_outer, params);
        }
    }
}

bool satisfies_phy1(const Tensor3& x)
{
    const Dims d = x.dims();
    for (std::size_t j = 0; j < d.rbs; ++j) {
        for (std::size_t p = 0; p < d.aps; ++p) {
            double load = 0.0;
            for (std::size_t f = 0; f < d.flows; ++f) {
                load += x(f, p, j);
            }
            if (load > 1.0) {
                return false;
            }
        }
    }
    return true;
}

bool satisfies_phy2(const Tensor3& x)
{
    const Dims d = x.dims();
    for (std::size_t j = 0; j < d.rbs; ++j) {
        for (std::size_t f = 0; f < d.flows; ++f) {
            double load = 0.0;
            for (std::size_t p = 0; p < d.aps; ++p) {
                load += x(f, p, j);
            }
            if (load > 1.0) {
                return false;
            }
        }
    }
    return true;
}

FeasibilityReport check_feasibility(const FrameProblem& problem, const Tensor3& x, double int_tol)
{
    FeasibilityReport out{{}, Tensor3(x.dims()), {}};
    out.flags.integer = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x.data()[i];
        const double snapped = v >= 0.5 ? 1.0 : 0.0;
        if (std::abs(v - snapped) > int_tol) {
            out.flags.integer = false;
        }
        out.snapped.data()[i] = snapped;
    }
    out.flags.phy1 = satisfies_phy1(out.snapped);
    out.flags.phy2 = satisfies_phy2(out.snapped);
    out.rates = frame_rates(problem.gains, out.snapped, problem.radio);
    out.flags.fmac = true;
    for (std::size_t f = 0; f < out.rates.size(); ++f) {
        if (out.rates[f] < problem.r_min[f]) {
            out.flags.fmac = false;
        }
    }
    return out;
}

std::string_view to_string(BreakReason reason)
{
    switch (reason) {
    case BreakReason::gap_and_feasible:
        return "gap_and_feasible";
    case BreakReason::feasible_only:
        return "feasible_only";
    case BreakReason::exhausted:
        return "exhausted";
    }
    return "exhausted";
}

Tensor3 phy_repair(const Tensor3& x)
{
    const Dims d = x.dims();
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x.data()[a] > x.data()[b]; });
    Tensor3 out(d);
    std::vector<char> ap_busy(d.aps * d.rbs, 0);
    std::vector<char> flow_busy(d.flows * d.rbs, 0);
    for (std::size_t idx : order) {
        if (x.data()[idx] < 0.5) {
            break;
        }
        const std::size_t f = idx % d.flows;
        const std::size_t p = (idx / d.flows) % d.aps;
        const std::size_t j = idx / (d.flows * d.aps);
        if (ap_busy[j * d.aps + p] || flow_busy[j * d.flows + f]) {
            continue;
        }
        ap_busy[j * d.aps + p] = 1;
        flow_busy[j * d.flows + f] = 1;
        out(f, p, j) = 1.0;
    }
    return out;
}

FrameSolution solve_frame(const FrameProblem& problem, const SolverParams& params, const SolveOptions& options)
{
    const Dims d = problem.dims();
    const double nu = effective_sharpness(problem, params);
    Tensor3 x(d, params.initial_allocation);
    for (std::size_t f = 0; f < d.flows; ++f) {
        if (idle(problem, f)) {
            for (std::size_t j = 0; j < d.rbs; ++j) {
                for (std::size_t p = 0; p < d.aps; ++p) {
                    x(f, p, j) = 0.0;
                }
            }
        }
    }
    DualState duals(d);
    std::optional<double> eps_outer_first;
    if (params.eps_outer_mode == EpsOuterMode::absolute) {
        eps_outer_first = params.eps_outer_first;
    }

    std::optional<FeasibilityReport> best;
    double best_objective = -std::numeric_limits<double>::infinity();
    FrameSolution out;

    for (std::size_t i = 1; i <= params.outer_max; ++i) {
        const InnerResult inner = inner_loop(problem, x, duals, params, i);
        interface_projection(x);
        const std::vector<double> rates = frame_rates(problem.gains, x, problem.radio);
        dual_update(duals, x, problem.r_min, rates, i, params);
        const double primal = objective_from_rates(problem, rates, nu);
        const double dual = lagrangian(problem, x, duals, nu);
        const double gap = std::abs(dual - primal);

        FeasibilityReport report = check_feasibility(problem, x, params.int_tol);
        const FeasibilityFlags flags = report.flags;
        const bool feasible = flags.all();
        bool original_fmac = true;
        if (options.original_r_min) {
            for (std::size_t f = 0; f < d.flows; ++f) {
                if (report.rates[f] < (*options.original_r_min)[f]) {
                    original_fmac = false;
                }
            }
        }
        if (feasible) {
            const double value = objective_from_rates(problem, report.rates, nu);
            if (!eps_outer_first) {
                eps_outer_first = params.eps_outer_first * std::abs(value);
            }
            if (value > best_objective) {
                best_objective = value;
                best = std::move(report);
            }
        }
        const double eps_outer =
            eps_outer_first ? outer_tolerance(i, *eps_outer_first, params) : std::numeric_limits<double>::quiet_NaN();
        const bool gap_ok = feasible && gap <= eps_outer;
        const bool late_ok = feasible && double(i) >= double(params.outer_max) / 2.0;

        if (options.trace) {
            TraceRecord rec;
            rec.outer_iter = i;
            rec.primal = primal;
            rec.dual = dual;
            rec.gap = gap;
            rec.eps_outer = eps_outer;
            rec.inner_iters = inner.sweeps;
            rec.flags = flags;
            rec.original_fmac = original_fmac;
            rec.broke = gap_ok || late_ok;
            options.trace->records.push_back(rec);
        }

        out.outer_iterations = i;
        if (gap_ok || late_ok) {
            out.break_reason = gap_ok ? BreakReason::gap_and_feasible : BreakReason::feasible_only;
            break;
        }
    }

    out.duals = duals;
    if (best) {
        if (out.break_reason == BreakReason::exhausted) {
            out.break_reason = BreakReason::feasible_only;
        }
        out.converged = true;
        out.allocation = std::move(best->snapped);
        out.frame_rates = std::move(best->rates);
        out.objective = best_objective;
        return out;
    }
    out.converged = false;
    out.break_reason = BreakReason::exhausted;
    out.allocation = phy_repair(x);
    out.frame_rates = frame_rates(problem.gains, out.allocation, problem.radio);
    out.objective = objective_from_rates(problem, out.frame_rates, nu);
    return out;
}

} // namespace qosaic
