#include "qosaic/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qosaic {

namespace {

// Sum of x over flows for every (ap, rb): how much each AP transmits on each RB.
std::vector<double> ap_loads(const Tensor3& x)
{
    const Dims d = x.dims();
    std::vector<double> load(d.aps * d.rbs, 0.0);
    for (std::size_t j = 0; j < d.rbs; ++j) {
        for (std::size_t p = 0; p < d.aps; ++p) {
            double sum = 0.0;
            for (std::size_t f = 0; f < d.flows; ++f) {
                sum += x(f, p, j);
            }
            load[j * d.aps + p] = sum;
        }
    }
    return load;
}

} // namespace

Tensor3 intercell_interference(const Tensor3& gains, const Tensor3& x)
{
    require_same_dims(gains, x, "intercell_interference");
    const Dims d = x.dims();
    const std::vector<double> load = ap_loads(x);
    Tensor3 out(d);
    for (std::size_t j = 0; j < d.rbs; ++j) {
        for (std::size_t f = 0; f < d.flows; ++f) {
            for (std::size_t p = 0; p < d.aps; ++p) {
                double sum = 0.0;
                for (std::size_t q = 0; q < d.aps; ++q) {
                    if (q != p) {
                        sum += gains(f, q, j) * load[j * d.aps + q];
                    }
                }
                out(f, p, j) = sum;
            }
        }
    }
    return out;
}

Tensor3 intracell_interference(const Tensor3& gains, const Tensor3& x)
{
    require_same_dims(gains, x, "intracell_interference");
    const Dims d = x.dims();
    const std::vector<double> load = ap_loads(x);
    Tensor3 out(d);
    for (std::size_t j = 0; j < d.rbs; ++j) {
        for (std::size_t p = 0; p < d.aps; ++p) {
            for (std::size_t f = 0; f < d.flows; ++f) {
                out(f, p, j) = gains(f, p, j) * std::max(0.0, load[j * d.aps + p] - x(f, p, j));
            }
        }
    }
    return out;
}

InterferenceTensor interference(const Tensor3& gains, const Tensor3& x)
{
    InterferenceTensor out{Tensor3(x.dims()), intercell_interference(gains, x), intracell_interference(gains, x)};
    for (std::size_t i = 0; i < out.total.size(); ++i) {
        out.total.data()[i] = out.intercell.data()[i] + out.intracell.data()[i];
    }
    return out;
}

LinkRates sinr_and_rate(const Tensor3& gains, const Tensor3& x, const RadioParams& radio)
{
    const Dims d = x.dims();
    const Tensor3 total = interference(gains, x).total;
    LinkRates out{Tensor3(d), Tensor3(d), std::vector<double>(d.flows, 0.0)};
    for (std::size_t j = 0; j < d.rbs; ++j) {
        for (std::size_t p = 0; p < d.aps; ++p) {
            for (std::size_t f = 0; f < d.flows; ++f) {
                const double sinr = x(f, p, j) * gains(f, p, j) / (radio.noise + total(f, p, j));
                const double b = std::log2(1.0 + sinr / radio.sinr_gap);
                out.sinr(f, p, j) = sinr;
                out.efficiency(f, p, j) = b;
                out.rates[f] += radio.bandwidth * b;
            }
        }
    }
    return out;
}

std::vector<double> frame_rates(const Tensor3& gains, const Tensor3& x, const RadioParams& radio)
{
    require_same_dims(gains, x, "frame_rates");
    const Dims d = x.dims();
    const std::vector<double> load = ap_loads(x);
    std::vector<double> rates(d.flows, 0.0);
    for (std::size_t j = 0; j < d.rbs; ++j) {
        for (std::size_t f = 0; f < d.flows; ++f) {
            double received = 0.0;
            for (std::size_t p = 0; p < d.aps; ++p) {
                received += gains(f, p, j) * load[j * d.aps + p];
            }
            for (std::size_t p = 0; p < d.aps; ++p) {
                const double xv = x(f, p, j);
                if (xv <= 0.0) {
                    continue;
                }
                const double signal = xv * gains(f, p, j);
                const double interf = std::max(0.0, received - signal);
                rates[f] += radio.bandwidth * std::log2(1.0 + signal / (radio.sinr_gap * (radio.noise + interf)));
            }
        }
    }
    return rates;
}

std::vector<double> rate_gradient(const Tensor3& gains, const Tensor3& x, const RadioParams& radio,
                                  std::size_t flow, std::size_t ap, std::size_t rb)
{
    require_same_dims(gains, x, "rate_gradient");
    const Dims d = x.dims();
    const Tensor3 total = interference(gains, x).total;
    const double ln2 = std::numbers::ln2;
    const double gap = radio.sinr_gap;
    std::vector<double> grad(d.flows, 0.0);

    // Own link: d b / d x.
    {
        const double g = gains(flow, ap, rb);
        const double n_i = radio.noise + total(flow, ap, rb);
        grad[flow] += g / (ln2 * (gap * n_i + g * x(flow, ap, rb)));
    }
    // Every other link on the same RB sees its interference grow by gains(f, ap, rb) per unit of x.
    for (std::size_t p = 0; p < d.aps; ++p) {
        for (std::size_t f = 0; f < d.flows; ++f) {
            if (f == flow && p == ap) {
                continue;
            }
            const double xv = x(f, p, rb);
            if (xv <= 0.0) {
                continue;
            }
            const double g = gains(f, p, rb);
            const double n_i = radio.noise + total(f, p, rb);
            const double db_di = -xv * g / (ln2 * n_i * (gap * n_i + g * xv));
            grad[f] += db_di * gains(f, ap, rb);
        }
    }
    for (double& v : grad) {
        v *= radio.bandwidth;
    }
    return grad;
}

double interference_free_capacity(const Tensor3& gains, const RadioParams& radio, std::size_t flow)
{
    const Dims d = gains.dims();
    double rate = 0.0;
    for (std::size_t j = 0; j < d.rbs; ++j) {
        double best = 0.0;
        for (std::size_t p = 0; p < d.aps; ++p) {
            best = std::max(best, gains(flow, p, j));
        }
        rate += radio.bandwidth * std::log2(1.0 + best / (radio.sinr_gap * radio.noise));
    }
    return rate;
}

} // namespace qosaic
