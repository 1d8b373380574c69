#pragma once

#include <cstddef>
#include <vector>

#include "qosaic/model.hpp"

namespace qosaic {

/// Relative target violations of one flow in one frame.
struct FrameOutage {
    double rmin = 0.0;
    double rbar_min = 0.0;
    double dbar_max = 0.0;
    double rmin_indicator = 0.0;
};

/// Targets <= 0 are vacuous and yield zero outage.
FrameOutage frame_outages(double r, double r_min, double r_bar, double rbar_min, double d_bar, double dbar_max);

void accumulate(OutageAccumulator& acc, const FrameOutage& outage);

/// Flow whose min-rate requirement is cheapest to relax. Throws std::logic_error
/// when no flow has r_min > 0.
std::size_t select_compromise_flow(const std::vector<double>& r_min, const std::vector<double>& mean_outage_rmin,
                                   IlmSelection selection = IlmSelection::argmax);

struct Relaxation {
    std::size_t flow = 0;
    double old_r_min = 0.0;
    double new_r_min = 0.0;
};

/// Shrinks r_min of one flow, or drops it once it falls below the give-up threshold.
Relaxation relax(FrameRequirements& reqs, std::size_t flow, const IlmParams& params);

} // namespace qosaic
