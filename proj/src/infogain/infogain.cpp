#include "infogain/infogain.hpp"

#include "core/errors.hpp"
#include "core/process.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace moran {

double bernoulli_kl(double p, double p_hat)
{
    if (!(p > 0.0 && p < 1.0) || !(p_hat > 0.0 && p_hat < 1.0))
        throw DomainError(fmt::format("bernoulli_kl: arguments must lie in (0, 1), got {} and {}", p, p_hat));
    if (p == p_hat)
        return 0.0;
    const double kl = p * std::log(p / p_hat) + (1.0 - p) * std::log((1.0 - p) / (1.0 - p_hat));
    return std::max(kl, 0.0);
}

double digamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("digamma: argument must be positive and finite");
    double result = 0.0;
    // Recurrence psi(x) = psi(x + 1) - 1/x up to the asymptotic regime.
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Asymptotic series with Bernoulli-number coefficients.
    const double tail =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    return result + std::log(x) - 0.5 * inv - tail;
}

double log_beta(double a, double b)
{
    if (!(a > 0.0 && b > 0.0))
        throw DomainError("log_beta: arguments must be positive");
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_kl(double alpha_new, double beta_new, double alpha_old, double beta_old)
{
    for (double v : {alpha_new, beta_new, alpha_old, beta_old})
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError("beta_kl: parameters must be positive and finite");
    if (alpha_new == alpha_old && beta_new == beta_old)
        return 0.0;
    const double kl = log_beta(alpha_old, beta_old) - log_beta(alpha_new, beta_new) +
                      (alpha_new - alpha_old) * digamma(alpha_new) + (beta_new - beta_old) * digamma(beta_new) +
                      (alpha_old - alpha_new + beta_old - beta_new) * digamma(alpha_new + beta_new);
    return std::max(kl, 0.0);
}

std::vector<SelectionEvent> informative_events(std::span<const SelectionEvent> events)
{
    std::vector<SelectionEvent> out;
    for (const auto& e : events)
        if (e.kind != EventKind::Death && e.pool.interior())
            out.push_back(e);
    return out;
}

std::vector<InfoGainRecord> info_gain_trace(const EventLog& log, std::span<const double> estimates, double r_max)
{
    if (!(log.true_r > 0.0))
        throw DomainError("info_gain_trace needs a positive true r recorded in the log");
    const auto events = informative_events(log.events);
    if (estimates.size() != events.size())
        throw DomainError(fmt::format("info_gain_trace: {} estimates for {} informative events", estimates.size(),
                                      events.size()));

    // Keep p_hat strictly inside (0, 1).
    const double lo = 1e-9 * r_max;
    const double hi = r_max * (1.0 - 1e-9);

    std::vector<InfoGainRecord> trace;
    trace.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        InfoGainRecord rec;
        rec.step = e.step;
        rec.state = e.pool;
        rec.r_hat = estimates[i];
        rec.p_true = birth_probabilities(e.pool, constant_fitness(log.true_r)).p_A;
        rec.p_hat = birth_probabilities(e.pool, constant_fitness(std::clamp(estimates[i], lo, hi))).p_A;
        rec.kl = bernoulli_kl(rec.p_true, rec.p_hat);
        trace.push_back(rec);
    }
    return trace;
}

std::vector<InfoGainRecord> info_gain_trace(const EventLog& log, const InfoGainConfig& config)
{
    const auto events = informative_events(log.events);
    const auto grid = RGrid::make(config.grid);
    const auto estimates = incremental_trace(config.prior, events, config.estimator, grid);
    return info_gain_trace(log, estimates, config.grid.r_max);
}

} // namespace moran
