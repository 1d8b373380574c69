#pragma once

#include <cstddef>
#include <limits>

#include "qosaic/model.hpp"

namespace qosaic {

/// Forgetting factor of the running means, 1/k. Throws for k = 0.
double forgetting_factor(std::size_t k);

struct RsBounds {
    double r_min1 = 0.0;
    double r_max1 = std::numeric_limits<double>::infinity();
};

/// Per-frame rate window that keeps the running mean inside [rbar_min, rbar_max].
RsBounds translate_rs(double rbar_min, double rbar_max, double r_bar_prev, std::size_t k);

struct ZetaCoefficients {
    double z1 = 0.0; // bits
    double z2 = 0.0; // seconds
    double z3 = 0.0; // bits/s
    double z4 = 0.0;
};

ZetaCoefficients zeta(double q_bar_km2, double q_km1, double r_bar_km1, std::size_t k, double rb_duration_s);

/// Mean-delay estimate (seconds) if the flow is served at rate r this frame.
double mean_delay_estimate(const ZetaCoefficients& z, double r);

/// Smallest frame rate whose delay estimate stays within dbar_max_s, clamped at 0.
double translate_ds(const ZetaCoefficients& z, double dbar_max_s);

/// Rate above which the backlog would run dry.
double frugality_bound(double q_km1, double r_bar_km1, double rb_duration_s);

/// Concave increasing utility of the mean rate.
struct Utility {
    enum class Kind { log, linear };
    Kind kind = Kind::log;
    double rho = 1.0; // offset of ln(R + rho), bits/s

    double value(double r) const;
    double derivative(double r) const;
};

double fairness_weight(const Utility& utility, double r_bar_prev, std::size_t k);

struct SigmoidValue {
    double value = 0.0; // Z(r) <= 0
    double slope = 0.0; // dZ/dr in (0, 1)
};

/// Soft frugality penalty Z(r) = log(logistic(nu (r - r_max))) / nu.
SigmoidValue sigmoid(double r, double r_max, double nu);

/// d_HOL_max * delta: the mean-delay bound that caps HOL-delay outage at delta.
double hol_to_mean_delay_bound(double hol_max, double outage_prob);

struct FlowRequirement {
    double r_min = 0.0;
    double r_max = 0.0;
    double w = 0.0;
};

/// Translates one flow's mean targets into this frame's rate bounds and weight.
///
/// `queue_bits` is the backlog the bounds are computed from; the caller decides
/// whether that includes this frame's arrivals.
FlowRequirement qosift(const FlowSpec& spec, const FlowState& state, double queue_bits, std::size_t k,
                       double rb_duration_s, const Utility& utility);

/// Little's-law delay of the running means, in frames.
double littles_law_delay_frames(double q_bar, double r_bar, double rb_duration_s);

} // namespace qosaic
