#include "inference/fps.hpp"

#include "core/errors.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace moran {

void FpsParameterSet::add(FpsKey key, FpsCounts delta)
{
    if (key.a <= 0 || key.a >= key.M)
        throw DomainError(fmt::format("FPS index (M={}, a={}) is not interior", key.M, key.a));
    if (!(delta.alpha >= 0.0 && delta.beta >= 0.0 && delta.gamma >= 0.0))
        throw DomainError("FPS parameters must be nonnegative");
    auto& slot = entries_[key];
    slot.alpha += delta.alpha;
    slot.beta += delta.beta;
    slot.gamma += delta.gamma;
}

FpsParameterSet& FpsParameterSet::operator+=(const FpsParameterSet& other)
{
    for (const auto& [key, counts] : other.entries_)
        add(key, counts);
    return *this;
}

FpsCounts FpsParameterSet::at(FpsKey key) const
{
    const auto it = entries_.find(key);
    return it == entries_.end() ? FpsCounts{} : it->second;
}

double FpsParameterSet::total_alpha() const
{
    double s = 0.0;
    for (const auto& [key, c] : entries_)
        s += c.alpha;
    return s;
}

double FpsParameterSet::total_beta() const
{
    double s = 0.0;
    for (const auto& [key, c] : entries_)
        s += c.beta;
    return s;
}

double FpsParameterSet::total_gamma() const
{
    double s = 0.0;
    for (const auto& [key, c] : entries_)
        s += c.gamma;
    return s;
}

FpsParameterSet FpsParameterSet::uniform_counts(std::int64_t N, double value)
{
    FpsParameterSet p;
    for (std::int64_t a = 1; a < N; ++a)
        p.add({N, a}, {value, value, 0.0});
    return p;
}

bool accumulate_event(FpsParameterSet& params, const SelectionEvent& e)
{
    if (e.kind == EventKind::Death || !e.pool.interior())
        return false;
    const FpsKey key{e.pool.size(), e.pool.a};
    if (e.kind == EventKind::Birth) {
        e.winner == Type::A ? params.add_alpha(key) : params.add_beta(key);
        return true;
    }
    // Composite Moran step: only the state change is observable.
    if (e.stayed)
        params.add_gamma(key);
    else if (e.post_state.a > e.pre_state.a)
        params.add_alpha(key);
    else
        params.add_beta(key);
    return true;
}

FpsParameterSet accumulate(std::span<const SelectionEvent> events)
{
    FpsParameterSet params;
    for (const auto& e : events)
        accumulate_event(params, e);
    return params;
}

double fps_log_density(const FpsParameterSet& params, double r, bool include_gamma)
{
    if (!(r > 0.0))
        throw DomainError("fps_log_density: r must be positive");
    const double log_r = std::log(r);
    double total = 0.0;
    for (const auto& [key, c] : params.entries()) {
        const double a = static_cast<double>(key.a);
        const double b = static_cast<double>(key.M - key.a);
        const double gamma = include_gamma ? c.gamma : 0.0;
        total += c.beta * log_r - (c.alpha + c.beta + gamma) * std::log(a + r * b);
        if (gamma != 0.0)
            total += gamma * std::log(a * a + r * b * b);
    }
    return total;
}

double fps_log_density_at_zero(const FpsParameterSet& params, bool include_gamma)
{
    double total = 0.0;
    for (const auto& [key, c] : params.entries()) {
        if (c.beta > 0.0)
            return -std::numeric_limits<double>::infinity();
        const double a = static_cast<double>(key.a);
        const double gamma = include_gamma ? c.gamma : 0.0;
        total -= (c.alpha + gamma) * std::log(a);
        if (gamma != 0.0)
            total += gamma * std::log(a * a);
    }
    return total;
}

double fps_log_density_derivative(const FpsParameterSet& params, double r, bool include_gamma)
{
    if (!(r > 0.0))
        throw DomainError("fps_log_density_derivative: r must be positive");
    double total = 0.0;
    for (const auto& [key, c] : params.entries()) {
        const double a = static_cast<double>(key.a);
        const double b = static_cast<double>(key.M - key.a);
        const double gamma = include_gamma ? c.gamma : 0.0;
        total += c.beta / r - (c.alpha + c.beta + gamma) * b / (a + r * b);
        if (gamma != 0.0)
            total += gamma * b * b / (a * a + r * b * b);
    }
    return total;
}

} // namespace moran
