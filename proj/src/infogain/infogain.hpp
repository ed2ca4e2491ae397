#pragma once

#include "inference/posterior.hpp"
#include "sim/events.hpp"

#include <memory>
#include <vector>

namespace moran {

/// KL divergence (nats) of Bernoulli(p_hat) from Bernoulli(p). Both in (0, 1).
double bernoulli_kl(double p, double p_hat);

/// Digamma function for x > 0.
double digamma(double x);

/// log B(a, b) for a, b > 0.
double log_beta(double a, double b);

/// KL(Beta(alpha_new, beta_new) || Beta(alpha_old, beta_old)) in nats.
double beta_kl(double alpha_new, double beta_new, double alpha_old, double beta_old);

struct InfoGainRecord {
    std::uint64_t step = 0;
    PopulationState state;
    double r_hat = 0.0;
    double p_true = 0.0;
    double p_hat = 0.0;
    double kl = 0.0;
};

struct InfoGainConfig {
    PriorSpec prior = PriorSpec::gamma();
    GridConfig grid;
    Estimator estimator = Estimator::Mean;
};

/// Per informative event: running estimate after the prefix ending at that event, then
/// the KL between the A-selection probabilities a / (a + r b) under the true r and under
/// the estimate, evaluated at the event's pool.
std::vector<InfoGainRecord> info_gain_trace(const EventLog& log, const InfoGainConfig& config);

/// Same, with the estimate sequence supplied by the caller (one per informative event).
std::vector<InfoGainRecord> info_gain_trace(const EventLog& log, std::span<const double> estimates, double r_max);

/// Birth/MoranComposite events with interior pools, in log order.
std::vector<SelectionEvent> informative_events(std::span<const SelectionEvent> events);

} // namespace moran
