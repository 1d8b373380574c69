#pragma once

#include <cstddef>
#include <vector>

#include "qosaic/model.hpp"
#include "qosaic/tensor.hpp"

namespace qosaic {

/// Link-level constants shared by the rate model.
///
/// Spectral efficiency is log2(1 + SINR / gap); gap = 1 is the Shannon bound.
struct RadioParams {
    double bandwidth = 1.0;   // W_b; 1 gives rates in bit/s/Hz
    double noise = 1.0;       // gamma_noise
    double sinr_gap = 1.0;    // multiplicative SINR gap, >= 1

    static RadioParams from_network(const NetworkConfig& config)
    {
        return {config.rb_bandwidth_hz, config.noise_power, 1.0};
    }
};

struct InterferenceTensor {
    Tensor3 total;
    Tensor3 intercell;
    Tensor3 intracell;
};

struct LinkRates {
    Tensor3 sinr;
    Tensor3 efficiency;       // b, bit/s/Hz per link
    std::vector<double> rates; // r per flow, W_b * sum of b
};

Tensor3 intercell_interference(const Tensor3& gains, const Tensor3& x);
Tensor3 intracell_interference(const Tensor3& gains, const Tensor3& x);
InterferenceTensor interference(const Tensor3& gains, const Tensor3& x);

LinkRates sinr_and_rate(const Tensor3& gains, const Tensor3& x, const RadioParams& radio);

/// Per-flow frame rates only; cheaper than sinr_and_rate.
std::vector<double> frame_rates(const Tensor3& gains, const Tensor3& x, const RadioParams& radio);

/// d r_phi / d x(rb)_{flow,ap} for every flow phi, analytic.
std::vector<double> rate_gradient(const Tensor3& gains, const Tensor3& x, const RadioParams& radio,
                                  std::size_t flow, std::size_t ap, std::size_t rb);

/// Upper bound on a flow's frame rate: best AP on every RB, no interference.
double interference_free_capacity(const Tensor3& gains, const RadioParams& radio, std::size_t flow);

} // namespace qosaic
