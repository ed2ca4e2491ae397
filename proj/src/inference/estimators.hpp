#pragma once

#include "inference/fps.hpp"

#include <span>
#include <string_view>

namespace moran {

/// Outcome of a ratio estimator. Zero, Infinite and Undefined are first-class results
/// (one type never reproduced), not errors.
struct RatioEstimate {
    enum class Status { Value, Zero, Infinite, Undefined };
    Status status = Status::Undefined;
    double value = 0.0;

    bool usable() const { return status == Status::Value; }

    static RatioEstimate from_ratio(double numerator, double denominator);
};

std::string_view to_string(RatioEstimate::Status status);

/// sum(beta) / sum(alpha), with an optional pseudocount added to both sums.
RatioEstimate counting_estimate(const FpsParameterSet& params, double pseudocount = 0.0);

/// Births weighted by the reciprocal of the winner's pool count:
///   [sum over B-births of 1/b_pool] / [sum over A-births of 1/a_pool].
/// Composite Moran moves count as births at their pre-state; stays and single-type
/// pools are skipped.
RatioEstimate inverse_counting_estimate(std::span<const SelectionEvent> events);

} // namespace moran
