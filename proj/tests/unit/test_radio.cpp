#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle/brute_force.hpp"
#include "qosaic/radio.hpp"

using namespace qosaic;

namespace {

Tensor3 random_tensor(Dims d, std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Tensor3 t(d);
    for (double& v : t.data()) {
        v = u(rng);
    }
    return t;
}

} // namespace

TEST_CASE("intercell interference")
{
    SUBCASE("single AP sees none")
    {
        std::mt19937_64 rng(1);
        const Tensor3 g = random_tensor({3, 1, 2}, rng, 0.1, 5.0);
        const Tensor3 x = random_tensor({3, 1, 2}, rng, 0.0, 1.0);
        const Tensor3 inter = intercell_interference(g, x);
        for (double v : inter.data()) {
            CHECK(v == 0.0);
        }
    }
    SUBCASE("nothing transmits")
    {
        Tensor3 g({2, 2, 2}, 3.0);
        const Tensor3 inter = intercell_interference(g, Tensor3({2, 2, 2}));
        for (double v : inter.data()) {
            CHECK(v == 0.0);
        }
    }
    SUBCASE("two cells, unit gains")
    {
        Tensor3 g({2, 2, 1}, 1.0);
        Tensor3 x({2, 2, 1});
        x(0, 0, 0) = 1.0;
        x(1, 1, 0) = 1.0;
        CHECK(intercell_interference(g, x)(0, 0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("mismatched shapes throw")
    {
        CHECK_THROWS_AS(intercell_interference(Tensor3({2, 2, 1}), Tensor3({2, 1, 1})), std::invalid_argument);
    }
}

TEST_CASE("intracell interference")
{
    SUBCASE("one flow sees none")
    {
        std::mt19937_64 rng(2);
        const Tensor3 g = random_tensor({1, 3, 2}, rng, 0.1, 5.0);
        const Tensor3 x = random_tensor({1, 3, 2}, rng, 0.0, 1.0);
        const Tensor3 intra = intracell_interference(g, x);
        for (double v : intra.data()) {
            CHECK(v == 0.0);
        }
    }
    SUBCASE("direct evaluation")
    {
        Tensor3 g({2, 1, 1});
        g(0, 0, 0) = 2.0;
        Tensor3 x({2, 1, 1});
        x(1, 0, 0) = 0.5;
        CHECK(intracell_interference(g, x)(0, 0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("zero on active links of a PHY1-feasible allocation")
    {
        std::mt19937_64 rng(3);
        const Tensor3 g = random_tensor({3, 2, 2}, rng, 0.1, 5.0);
        Tensor3 x({3, 2, 2});
        x(0, 0, 0) = 1.0;
        x(1, 1, 0) = 1.0;
        x(2, 0, 1) = 1.0;
        const Tensor3 intra = intracell_interference(g, x);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x.data()[i] > 0.0) {
                CHECK(intra.data()[i] == 0.0);
            }
        }
    }
}

TEST_CASE("total interference is the sum of both parts")
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        const Tensor3 g = random_tensor({3, 3, 2}, rng, 0.0, 10.0);
        const Tensor3 x = random_tensor({3, 3, 2}, rng, 0.0, 1.0);
        const InterferenceTensor i = interference(g, x);
        for (std::size_t n = 0; n < g.size(); ++n) {
            CHECK(i.total.data()[n] == doctest::Approx(i.intercell.data()[n] + i.intracell.data()[n]));
            CHECK(i.intercell.data()[n] >= 0.0);
            CHECK(i.intracell.data()[n] >= 0.0);
        }
    }
}

TEST_CASE("SINR and rate")
{
    const RadioParams radio{1.0, 1.0, 1.0};
    SUBCASE("inactive link")
    {
        Tensor3 g({1, 1, 1}, 7.0);
        const LinkRates lr = sinr_and_rate(g, Tensor3({1, 1, 1}), radio);
        CHECK(lr.sinr(0, 0, 0) == 0.0);
        CHECK(lr.efficiency(0, 0, 0) == 0.0);
        CHECK(lr.rates[0] == 0.0);
    }
    SUBCASE("lone link")
    {
        Tensor3 g({1, 1, 1}, 7.0);
        const LinkRates lr = sinr_and_rate(g, Tensor3({1, 1, 1}, 1.0), radio);
        CHECK(lr.sinr(0, 0, 0) == doctest::Approx(7.0));
        CHECK(lr.efficiency(0, 0, 0) == doctest::Approx(3.0));
    }
    SUBCASE("two interfering cells")
    {
        Tensor3 g({2, 2, 1}, 1.0);
        g(0, 0, 0) = 10.0;
        g(1, 1, 0) = 10.0;
        Tensor3 x({2, 2, 1});
        x(0, 0, 0) = 1.0;
        x(1, 1, 0) = 1.0;
        const LinkRates lr = sinr_and_rate(g, x, radio);
        CHECK(lr.sinr(0, 0, 0) == doctest::Approx(5.0));
        CHECK(lr.efficiency(0, 0, 0) == doctest::Approx(std::log2(6.0)));
        CHECK(lr.rates[1] == doctest::Approx(std::log2(6.0)));
    }
    SUBCASE("bandwidth and gap scale as stated")
    {
        Tensor3 g({1, 1, 2}, 3.0);
        const RadioParams r{180e3, 1.0, 2.0};
        const LinkRates lr = sinr_and_rate(g, Tensor3({1, 1, 2}, 1.0), r);
        CHECK(lr.rates[0] == doctest::Approx(2.0 * 180e3 * std::log2(2.5)));
    }
}

TEST_CASE("library rates agree with the direct oracle formula")
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const Tensor3 g = random_tensor({3, 2, 3}, rng, 0.0, 20.0);
        const Tensor3 x = random_tensor({3, 2, 3}, rng, 0.0, 1.0);
        const RadioParams radio{2.0, 0.5, 1.5};
        const std::vector<double> mine = frame_rates(g, x, radio);
        const std::vector<double> ref = oracle::rates(g, x, radio.noise, radio.bandwidth, radio.sinr_gap);
        const std::vector<double> full = sinr_and_rate(g, x, radio).rates;
        for (std::size_t f = 0; f < mine.size(); ++f) {
            CHECK(oracle::close_rel(mine[f], ref[f], 1e-12));
            CHECK(oracle::close_rel(full[f], ref[f], 1e-12));
        }
    }
}

TEST_CASE("rate gradient matches central differences")
{
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::size_t> pick(0, 1000);
    const RadioParams radio{1.0, 1.0, 1.0};
    const Dims d{3, 2, 2};
    for (int t = 0; t < 100; ++t) {
        const Tensor3 g = random_tensor(d, rng, 0.5, 20.0);
        const Tensor3 x = random_tensor(d, rng, 0.05, 0.95);
        const std::size_t f = pick(rng) % d.flows;
        const std::size_t p = pick(rng) % d.aps;
        const std::size_t j = pick(rng) % d.rbs;
        const std::vector<double> grad = rate_gradient(g, x, radio, f, p, j);
        for (std::size_t phi = 0; phi < d.flows; ++phi) {
            const double fd = oracle::central_difference(
                [&](double v) {
                    Tensor3 y = x;
                    y(f, p, j) = v;
                    return oracle::rates(g, y, radio.noise, radio.bandwidth, radio.sinr_gap)[phi];
                },
                x(f, p, j), 1e-6);
            CHECK(oracle::close_rel(grad[phi], fd, 1e-4, 1e-6));
            if (phi != f) {
                CHECK(grad[phi] <= 0.0);
            }
        }
    }
}

TEST_CASE("single link gradient is the own-link term only")
{
    Tensor3 g({1, 1, 1}, 4.0);
    Tensor3 x({1, 1, 1}, 0.5);
    const RadioParams radio{1.0, 1.0, 1.0};
    const double expected = 4.0 / ((1.0 + 4.0 * 0.5) * std::log(2.0));
    CHECK(rate_gradient(g, x, radio, 0, 0, 0)[0] == doctest::Approx(expected));
}

TEST_CASE("rate is nondecreasing in one own entry when every other entry is off")
{
    std::mt19937_64 rng(7);
    const Tensor3 g = random_tensor({2, 2, 2}, rng, 0.5, 5.0);
    const RadioParams radio{1.0, 1.0, 1.0};
    for (std::size_t p = 0; p < 2; ++p) {
        for (std::size_t j = 0; j < 2; ++j) {
            Tensor3 x({2, 2, 2});
            double last = 0.0;
            for (double v : {0.25, 0.5, 1.0}) {
                x(0, p, j) = v;
                const double r = frame_rates(g, x, radio)[0];
                CHECK(r >= last);
                last = r;
            }
        }
    }
}

TEST_CASE("interference-free capacity uses the best AP on every RB")
{
    Tensor3 g({1, 2, 2});
    g(0, 0, 0) = 1.0;
    g(0, 1, 0) = 3.0;
    g(0, 0, 1) = 7.0;
    g(0, 1, 1) = 0.0;
    const RadioParams radio{1.0, 1.0, 1.0};
    CHECK(interference_free_capacity(g, radio, 0) == doctest::Approx(2.0 + 3.0));
}
