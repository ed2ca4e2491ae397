#pragma once

#include "sim/events.hpp"

#include <cstdint>
#include <map>
#include <span>

namespace moran {

/// Index of an FPS parameter: selection pool of size M holding a type-A individuals.
struct FpsKey {
    std::int64_t M = 0;
    std::int64_t a = 0;

    friend auto operator<=>(const FpsKey&, const FpsKey&) = default;
};

struct FpsCounts {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    friend bool operator==(const FpsCounts&, const FpsCounts&) = default;
};

/// Sufficient statistics of the FPS family, keyed by (pool size, pool composition).
/// A single fixed population size, variable sizes and graph inbound pools all use the
/// same indexing. Only interior indices (0 < a < M) are admitted.
class FpsParameterSet {
public:
    using Map = std::map<FpsKey, FpsCounts>;

    void add(FpsKey key, FpsCounts delta);
    void add_alpha(FpsKey key, double v = 1.0) { add(key, {v, 0.0, 0.0}); }
    void add_beta(FpsKey key, double v = 1.0) { add(key, {0.0, v, 0.0}); }
    void add_gamma(FpsKey key, double v = 1.0) { add(key, {0.0, 0.0, v}); }

    /// Entrywise sum; commutative and associative.
    FpsParameterSet& operator+=(const FpsParameterSet& other);
    friend FpsParameterSet operator+(FpsParameterSet lhs, const FpsParameterSet& rhs) { return lhs += rhs; }

    FpsCounts at(FpsKey key) const;
    const Map& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    double total_alpha() const;
    double total_beta() const;
    double total_gamma() const;
    bool has_gamma() const { return total_gamma() > 0.0; }

    /// Sum of alpha > 1: the density is normalizable on [0, inf).
    bool proper_on_half_line() const { return total_alpha() > 1.0; }

    /// alpha_a = beta_a = value for every a in 1..N-1.
    static FpsParameterSet uniform_counts(std::int64_t N, double value = 1.0);

    friend bool operator==(const FpsParameterSet&, const FpsParameterSet&) = default;

private:
    Map entries_;
};

/// Tallies the FPS statistics of an event sequence. Death events and single-type pools
/// contribute nothing.
FpsParameterSet accumulate(std::span<const SelectionEvent> events);

/// Adds one event's contribution. Returns false when the event carries no information.
bool accumulate_event(FpsParameterSet& params, const SelectionEvent& event);

/// Unnormalized FPS log density at r > 0:
///   sum over (M, a) of beta log r - (alpha+beta+gamma) log(a + r(M-a)) + gamma log(a^2 + r(M-a)^2)
double fps_log_density(const FpsParameterSet& params, double r, bool include_gamma = true);

/// The r -> 0 limit: -inf if any beta > 0, finite otherwise.
double fps_log_density_at_zero(const FpsParameterSet& params, bool include_gamma = true);

/// d/dr of fps_log_density.
double fps_log_density_derivative(const FpsParameterSet& params, double r, bool include_gamma = true);

} // namespace moran
