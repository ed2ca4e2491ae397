#include "inference/estimators.hpp"

#include "core/errors.hpp"

#include <limits>

namespace moran {

RatioEstimate RatioEstimate::from_ratio(double numerator, double denominator)
{
    if (denominator > 0.0 && numerator > 0.0)
        return {Status::Value, numerator / denominator};
    if (denominator > 0.0)
        return {Status::Zero, 0.0};
    if (numerator > 0.0)
        return {Status::Infinite, std::numeric_limits<double>::infinity()};
    return {Status::Undefined, std::numeric_limits<double>::quiet_NaN()};
}

std::string_view to_string(RatioEstimate::Status status)
{
    switch (status) {
    case RatioEstimate::Status::Value: return "value";
    case RatioEstimate::Status::Zero: return "zero";
    case RatioEstimate::Status::Infinite: return "inf";
    case RatioEstimate::Status::Undefined: return "undefined";
    }
    return "undefined";
}

RatioEstimate counting_estimate(const FpsParameterSet& params, double pseudocount)
{
    if (!(pseudocount >= 0.0))
        throw DomainError("pseudocount must be nonnegative");
    return RatioEstimate::from_ratio(params.total_beta() + pseudocount, params.total_alpha() + pseudocount);
}

RatioEstimate inverse_counting_estimate(std::span<const SelectionEvent> events)
{
    double weighted_b = 0.0;
    double weighted_a = 0.0;
    for (const auto& e : events) {
        if (e.kind == EventKind::Death || !e.pool.interior())
            continue;
        Type born = e.winner;
        if (e.kind == EventKind::MoranComposite) {
            if (e.stayed)
                continue;
            born = e.post_state.a > e.pre_state.a ? Type::A : Type::B;
        }
        if (born == Type::A)
            weighted_a += 1.0 / static_cast<double>(e.pool.a);
        else
            weighted_b += 1.0 / static_cast<double>(e.pool.b);
    }
    return RatioEstimate::from_ratio(weighted_b, weighted_a);
}

} // namespace moran
