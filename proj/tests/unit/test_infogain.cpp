#include "core/errors.hpp"
#include "inference/posterior.hpp"
#include "infogain/infogain.hpp"
#include "sim/simulate.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <doctest.h>

#include <cmath>

using namespace moran;

TEST_CASE("bernoulli KL values")
{
    CHECK(bernoulli_kl(0.3, 0.3) == 0.0);
    CHECK(bernoulli_kl(0.5, 0.25) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-14));
    CHECK(bernoulli_kl(0.5, 0.25) == doctest::Approx(0.14384).epsilon(1e-4));
    CHECK(bernoulli_kl(0.25, 0.5) == doctest::Approx(0.13081).epsilon(1e-4));
    CHECK(bernoulli_kl(0.5, 0.25) != bernoulli_kl(0.25, 0.5));
    CHECK_THROWS_AS(bernoulli_kl(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(bernoulli_kl(0.5, 1.0), DomainError);
}

TEST_CASE("bernoulli KL is nonnegative and convex in the estimate")
{
    for (int i = 1; i < 50; ++i) {
        const double p = i / 50.0;
        for (int j = 1; j < 199; ++j) {
            const double q0 = (j - 0.5) / 200.0, q1 = j / 200.0, q2 = (j + 0.5) / 200.0;
            const double k0 = bernoulli_kl(p, q0), k1 = bernoulli_kl(p, q1), k2 = bernoulli_kl(p, q2);
            CHECK(k1 >= 0.0);
            CHECK(k0 + k2 - 2.0 * k1 >= -1e-15);
            // A-probability and B-probability give the same divergence.
            CHECK(bernoulli_kl(1.0 - p, 1.0 - q1) == doctest::Approx(k1).epsilon(1e-12));
        }
    }
}

TEST_CASE("digamma and log-beta against references")
{
    for (double x : {1e-3, 0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 9.99, 10.0, 42.0, 1e4})
        CHECK(digamma(x) == doctest::Approx(boost::math::digamma(x)).epsilon(1e-12));
    CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-14));
    CHECK(log_beta(2.0, 3.0) == doctest::Approx(std::log(1.0 / 12.0)).epsilon(1e-14));
    CHECK_THROWS_AS(digamma(0.0), DomainError);
    CHECK_THROWS_AS(log_beta(0.0, 1.0), DomainError);
}

TEST_CASE("beta KL")
{
    CHECK(beta_kl(2, 3, 2, 3) == 0.0);
    CHECK(beta_kl(2, 1, 1, 1) == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-13));
    CHECK(beta_kl(1, 2, 1, 1) == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-13));
    CHECK(beta_kl(2, 1, 1, 1) == doctest::Approx(0.19315).epsilon(1e-4));
    CHECK_THROWS_AS(beta_kl(0, 1, 1, 1), DomainError);
    CHECK_THROWS_AS(beta_kl(1, 1, 1, -2), DomainError);

    SUBCASE("quadrature reference")
    {
        boost::math::quadrature::tanh_sinh<double> integrator;
        auto log_pdf = [](double x, double a, double b) {
            return (a - 1) * std::log(x) + (b - 1) * std::log1p(-x) - (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
        };
        for (auto [a1, b1, a0, b0] : {std::array{2.0, 1.0, 1.0, 1.0}, {3.0, 5.0, 2.0, 2.0}, {1.5, 2.5, 4.0, 1.2},
                                      {10.0, 12.0, 9.0, 12.0}, {1.0, 1.0, 3.0, 3.0}, {6.0, 2.0, 2.0, 6.0}}) {
            const double reference = integrator.integrate(
                [&](double x) {
                    const double lp = log_pdf(x, a1, b1);
                    return std::exp(lp) * (lp - log_pdf(x, a0, b0));
                },
                0.0, 1.0);
            CHECK(beta_kl(a1, b1, a0, b0) == doctest::Approx(reference).epsilon(1e-9));
        }
    }
    SUBCASE("scaling toward a common mean shrinks the divergence")
    {
        double prev = INFINITY;
        for (double scale : {1.0, 10.0, 100.0, 1000.0, 1e4, 1e5}) {
            const double kl = beta_kl(2 * scale + 1, 3 * scale, 2 * scale, 3 * scale);
            CHECK(kl >= 0.0);
            CHECK(kl < prev);
            prev = kl;
        }
        CHECK(prev < 1e-5);
    }
}

TEST_CASE("information-gain traces")
{
    const WellMixedModel moran{};
    const auto log = run_trajectory(moran, PopulationState{20, 10}, 2.0, 4, 100000);
    InfoGainConfig config;
    const auto trace = info_gain_trace(log, config);
    const auto events = informative_events(log.events);
    REQUIRE(trace.size() == events.size());
    const auto estimates = incremental_trace(config.prior, events, config.estimator, RGrid::make(config.grid));
    for (std::size_t i = 0; i < trace.size(); ++i) {
        CHECK(trace[i].r_hat == estimates[i]);
        CHECK(trace[i].kl >= 0.0);
        CHECK(trace[i].state == events[i].pool);
        const double a = static_cast<double>(trace[i].state.a), b = static_cast<double>(trace[i].state.b);
        CHECK(trace[i].p_true == doctest::Approx(a / (a + 2.0 * b)).epsilon(1e-14));
    }

    const std::vector<double> pinned(events.size(), 2.0);
    for (const auto& rec : info_gain_trace(log, pinned, 20.0))
        CHECK(rec.kl == 0.0);

    std::vector<double> degenerate(events.size(), 0.0);
    for (const auto& rec : info_gain_trace(log, degenerate, 20.0)) {
        CHECK(std::isfinite(rec.kl));
        CHECK(rec.p_hat < 1.0);
    }
    CHECK_THROWS_AS(info_gain_trace(log, std::vector<double>(3, 1.0), 20.0), DomainError);
}
