#include "qosaic/qosift.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qosaic {

double forgetting_factor(std::size_t k)
{
    if (k == 0) {
        throw std::invalid_argument("frame index must be >= 1");
    }
    return 1.0 / double(k);
}

RsBounds translate_rs(double rbar_min, double rbar_max, double r_bar_prev, std::size_t k)
{
    const double h = forgetting_factor(k);
    RsBounds out;
    out.r_min1 = std::max(0.0, (rbar_min - (1.0 - h) * r_bar_prev) / h);
    if (std::isfinite(rbar_max)) {
        out.r_max1 = std::max(0.0, (rbar_max - (1.0 - h) * r_bar_prev) / h);
    }
    return out;
}

ZetaCoefficients zeta(double q_bar_km2, double q_km1, double r_bar_km1, std::size_t k, double rb_duration_s)
{
    if (k == 0) {
        throw std::invalid_argument("frame index must be >= 1");
    }
    const double kd = double(k);
    ZetaCoefficients z;
    z.z2 = rb_duration_s * (kd - 1.0) / (kd * kd);
    z.z1 = (kd - 2.0) / kd * q_bar_km2 + 2.0 / kd * q_km1 + z.z2 * r_bar_km1;
    if (k < 2) {
        // q_bar[k-2] does not exist yet; its coefficient is negative at k = 1.
        z.z1 = 2.0 / kd * q_km1 + z.z2 * r_bar_km1;
    }
    z.z3 = (kd - 1.0) / kd * r_bar_km1;
    z.z4 = 1.0 / kd;
    return z;
}

double mean_delay_estimate(const ZetaCoefficients& z, double r)
{
    return (z.z1 - z.z2 * r) / (z.z3 + z.z4 * r);
}

double translate_ds(const ZetaCoefficients& z, double dbar_max_s)
{
    return std::max(0.0, (z.z1 - z.z3 * dbar_max_s) / (z.z2 + z.z4 * dbar_max_s));
}

double frugality_bound(double q_km1, double r_bar_km1, double rb_duration_s)
{
    return (q_km1 + rb_duration_s * r_bar_km1) / rb_duration_s;
}

double Utility::value(double r) const
{
    return kind == Kind::log ? std::log(r + rho) : r;
}

double Utility::derivative(double r) const
{
    return kind == Kind::log ? 1.0 / (r + rho) : 1.0;
}

double fairness_weight(const Utility& utility, double r_bar_prev, std::size_t k)
{
    const double h = forgetting_factor(k);
    return utility.derivative((1.0 - h) * r_bar_prev);
}

SigmoidValue sigmoid(double r, double r_max, double nu)
{
    // t = nu (r_max - r); Z = -softplus(t) / nu, slope = logistic(t).
    const double t = nu * (r_max - r);
    const double softplus = t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    const double slope = t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
    return {-softplus / nu, slope};
}

double hol_to_mean_delay_bound(double hol_max, double outage_prob)
{
    return hol_max * outage_prob;
}

FlowRequirement qosift(const FlowSpec& spec, const FlowState& state, double queue_bits, std::size_t k,
                       double rb_duration_s, const Utility& utility)
{
    FlowRequirement out;
    double r_min = 0.0;
    double r_max = frugality_bound(queue_bits, state.r_bar, rb_duration_s);
    if (spec.qos == QosClass::rate_sensitive && spec.rbar_min_bps) {
        const double rbar_max = spec.rbar_max_bps.value_or(std::numeric_limits<double>::infinity());
        const RsBounds rs = translate_rs(*spec.rbar_min_bps, rbar_max, state.r_bar, k);
        r_min = std::max(r_min, rs.r_min1);
        r_max = std::min(r_max, rs.r_max1);
    }
    if (spec.qos == QosClass::delay_sensitive && spec.dbar_max_frames) {
        const ZetaCoefficients z = zeta(state.q_prev2_bar, queue_bits, state.r_bar, k, rb_duration_s);
        r_min = std::max(r_min, translate_ds(z, *spec.dbar_max_frames * rb_duration_s));
    }
    out.r_min = r_min;
    out.r_max = std::max(0.0, r_max);
    out.w = fairness_weight(utility, state.r_bar, k);
    return out;
}

double littles_law_delay_frames(double q_bar, double r_bar, double rb_duration_s)
{
    return q_bar / std::max(r_bar, 1e-9) / rb_duration_s;
}

} // namespace qosaic
