#include "qosaic/ilm.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace qosaic {

FrameOutage frame_outages(double r, double r_min, double r_bar, double rbar_min, double d_bar, double dbar_max)
{
    FrameOutage out;
    if (r_min > 0.0) {
        out.rmin = std::max(0.0, 1.0 - r / r_min);
    }
    if (rbar_min > 0.0) {
        out.rbar_min = std::max(0.0, 1.0 - r_bar / rbar_min);
    }
    if (dbar_max > 0.0) {
        out.dbar_max = std::max(0.0, d_bar / dbar_max - 1.0);
    }
    out.rmin_indicator = out.rmin > 0.0 ? 1.0 : 0.0;
    return out;
}

void accumulate(OutageAccumulator& acc, const FrameOutage& outage)
{
    acc.rmin += outage.rmin;
    acc.rbar_min += outage.rbar_min;
    acc.dbar_max += outage.dbar_max;
    acc.rmin_indicator += outage.rmin_indicator;
    ++acc.frames;
}

std::size_t select_compromise_flow(const std::vector<double>& r_min, const std::vector<double>& mean_outage_rmin,
                                   IlmSelection selection)
{
    if (r_min.size() != mean_outage_rmin.size()) {
        throw std::invalid_argument("select_compromise_flow: dimension mismatch");
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::size_t best = r_min.size();
    double best_ratio = 0.0;
    for (std::size_t f = 0; f < r_min.size(); ++f) {
        if (!(r_min[f] > 0.0)) {
            continue;
        }
        const double ratio = mean_outage_rmin[f] > 0.0 ? r_min[f] / mean_outage_rmin[f] : inf;
        if (best == r_min.size()) {
            best = f;
            best_ratio = ratio;
            continue;
        }
        const bool better = selection == IlmSelection::argmax ? ratio > best_ratio : ratio < best_ratio;
        const bool tie = ratio == best_ratio;
        // Equal ratios (typically both infinite): the larger requirement goes first.
        if (better || (tie && r_min[f] > r_min[best])) {
            best = f;
            best_ratio = ratio;
        }
    }
    if (best == r_min.size()) {
        throw std::logic_error("nothing to compromise: no flow has r_min > 0");
    }
    return best;
}

Relaxation relax(FrameRequirements& reqs, std::size_t flow, const IlmParams& params)
{
    Relaxation out{flow, reqs.r_min.at(flow), 0.0};
    const double current = reqs.r_min[flow];
    if (current > 0.0 && current >= params.give_up_ratio * reqs.r_min_original[flow]) {
        reqs.r_min[flow] = params.relax_factor * current;
    } else {
        reqs.r_min[flow] = 0.0;
    }
    out.new_r_min = reqs.r_min[flow];
    return out;
}

} // namespace qosaic
