#pragma once

// Reference implementations used only by the tests. None of these share code
// with the library beyond the plain Tensor3 container.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "qosaic/solver.hpp"
#include "qosaic/tensor.hpp"

namespace oracle {

using qosaic::Tensor3;

/// Direct rate formula: r_f = W * sum over (p, j) of log2(1 + x g / (gap (noise + I))),
/// with I the power received from every other transmission on the same RB.
std::vector<double> rates(const Tensor3& gains, const Tensor3& x, double noise, double bandwidth, double gap);

struct ConstraintCheck {
    bool integer = false;
    bool phy1 = false;
    bool phy2 = false;
    bool fmac = false;

    bool all() const { return integer && phy1 && phy2 && fmac; }
};

/// Exact checks, no tolerance: entries in {0,1}, at most one flow per (AP, RB),
/// at most one AP per (flow, RB), r >= r_min.
ConstraintCheck check(const Tensor3& x, const std::vector<double>& r, const std::vector<double>& r_min);

/// log(logistic(nu (r - r_max))) / nu evaluated the naive way.
double sigmoid_value(double r, double r_max, double nu);

double objective(const qosaic::FrameProblem& problem, const std::vector<double>& r, double nu);

struct BruteForceResult {
    std::optional<Tensor3> best;     // empty when no binary tensor meets r_min
    double best_objective = 0.0;
    std::vector<double> best_rates;
    std::size_t phy_feasible = 0;    // binary tensors passing PHY1 and PHY2
    std::size_t fully_feasible = 0;  // ... and r >= r_min
};

/// Enumerates every assignment of at most one flow to each (AP, RB) and keeps
/// the PHY2- and r_min-feasible one of largest objective.
BruteForceResult brute_force_frame(const qosaic::FrameProblem& problem, double nu);

/// Calls `visit` on every binary tensor of the given shape (2^(F P J) of them).
void for_each_binary(const qosaic::Dims& dims, const std::function<void(const Tensor3&)>& visit);

/// Largest rate one flow can reach while every other flow keeps its r_min,
/// over PHY-feasible binary allocations; empty when the others cannot all be met.
std::optional<double> max_rate_with_others_met(const qosaic::FrameProblem& problem, std::size_t flow);

/// Flow whose relaxation least increases the next-frame sum of squared mean
/// min-rate outages, each candidate relaxed just enough to restore feasibility.
/// Empty when no single relaxation restores feasibility.
std::optional<std::size_t> lookahead_compromise(const qosaic::FrameProblem& problem,
                                                const std::vector<double>& mean_outage, std::size_t k);

double central_difference(const std::function<double(double)>& f, double x, double h);

bool close_rel(double a, double b, double rel, double abs_floor = 1e-12);

} // namespace oracle
