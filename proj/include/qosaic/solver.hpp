#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qosaic/model.hpp"
#include "qosaic/radio.hpp"
#include "qosaic/tensor.hpp"

namespace qosaic {

/// One frame's optimization input. Rates, r_min and r_max share the unit of
/// `radio.bandwidth` (bit/s/Hz when it is 1).
struct FrameProblem {
    Tensor3 gains;
    RadioParams radio;
    std::vector<double> r_min;
    std::vector<double> r_max;
    std::vector<double> w;
    // Bits per frame carried by one unit of rate; the Sigmoid sharpness is
    // stated per bit per frame.
    double sigmoid_scale = 1.0;

    Dims dims() const { return gains.dims(); }
};

/// Sigmoid sharpness in the problem's own rate unit.
double effective_sharpness(const FrameProblem& problem, const SolverParams& params);

std::vector<std::string> validate_problem(const FrameProblem& problem);

/// Sum of w * Z(r) over flows.
double objective_from_rates(const FrameProblem& problem, const std::vector<double>& rates, double nu);
double objective(const FrameProblem& problem, const Tensor3& x, double nu);

double lagrangian(const FrameProblem& problem, const Tensor3& x, const DualState& duals, double nu);

struct PrimalComponents {
    double upsilon = 0.0; // own-link gain of the weighted rate
    double dagger = 0.0;  // inter-cell cost, <= 0
    double ddagger = 0.0; // intra-cell cost, <= 0
};

/// Stationarity terms of the variable x(rb)_{flow,ap}; their sum is the
/// Lagrangian's partial derivative plus u + v.
PrimalComponents primal_components(const FrameProblem& problem, const Tensor3& x, const DualState& duals,
                                   double nu, std::size_t flow, std::size_t ap, std::size_t rb);

/// One fixed-point sweep over every variable, in place. Returns max |change|.
double primal_update(const FrameProblem& problem, Tensor3& x, const DualState& duals, const SolverParams& params);

struct InnerResult {
    std::size_t sweeps = 0;
    double last_change = 0.0;
};

InnerResult inner_loop(const FrameProblem& problem, Tensor3& x, const DualState& duals, const SolverParams& params,
                       std::size_t i_outer);

double inner_tolerance(std::size_t i_outer, const SolverParams& params);
double outer_tolerance(std::size_t i_outer, double eps_outer_first, const SolverParams& params);

/// Clips every entry to at most 1.
void interface_projection(Tensor3& x);

/// Multiplicative update of all three multiplier families.
void dual_update(DualState& duals, const Tensor3& x, const std::vector<double>& r_min,
                 const std::vector<double>& rates, std::size_t i_outer, const SolverParams& params);

/// Update of one multiplier given its constraint margin and reference scale.
double update_multiplier(double m, double margin, double ref, std::size_t i_outer, const SolverParams& params);

struct FeasibilityFlags {
    bool integer = false;
    bool phy1 = false; // one flow per (AP, RB)
    bool phy2 = false; // one AP per (flow, RB)
    bool fmac = false; // r >= r_min

    bool all() const { return integer && phy1 && phy2 && fmac; }
};

struct FeasibilityReport {
    FeasibilityFlags flags;
    Tensor3 snapped;
    std::vector<double> rates;
};

bool satisfies_phy1(const Tensor3& x);
bool satisfies_phy2(const Tensor3& x);

/// Snaps x to {0,1} and checks every constraint family on the snapped tensor.
FeasibilityReport check_feasibility(const FrameProblem& problem, const Tensor3& x, double int_tol);

enum class BreakReason { gap_and_feasible, feasible_only, exhausted };
std::string_view to_string(BreakReason reason);

struct TraceRecord {
    std::size_t outer_iter = 0;
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    double eps_outer = 0.0;
    std::size_t inner_iters = 0;
    FeasibilityFlags flags;
    bool original_fmac = false; // f-MAC against requirements before any relaxation
    bool broke = false;
};

struct SolverTrace {
    std::vector<TraceRecord> records;
};

struct FrameSolution {
    Allocation allocation;   // binary
    DualState duals;
    std::vector<double> frame_rates;
    double objective = 0.0;
    bool converged = false;
    BreakReason break_reason = BreakReason::exhausted;
    std::size_t outer_iterations = 0;
};

struct SolveOptions {
    const std::vector<double>* original_r_min = nullptr; // for the trace's original_fmac flag
    SolverTrace* trace = nullptr;
};

FrameSolution solve_frame(const FrameProblem& problem, const SolverParams& params, const SolveOptions& options = {});

/// Greedy round of a relaxed allocation into a PHY-feasible binary one:
/// largest entries first, entries below 0.5 dropped.
Tensor3 phy_repair(const Tensor3& x);

} // namespace qosaic
