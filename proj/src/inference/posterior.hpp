#pragma once

#include "inference/fps.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <vector>

namespace moran {

struct GridConfig {
    std::size_t points = 4001;
    double r_max = 20.0;
    // Uniform spacing on [0, uniform_until], log spacing on [uniform_until, r_max].
    double uniform_until = 2.0;

    friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

/// Strictly increasing evaluation points on [0, r_max] plus per-index log-factor rows
/// cached for reuse across posteriors on the same grid.
class RGrid {
public:
    static std::shared_ptr<const RGrid> make(const GridConfig& config);

    const GridConfig& config() const { return config_; }
    std::span<const double> r() const { return r_; }
    std::span<const double> log_r() const { return log_r_; }
    std::size_t size() const { return r_.size(); }

    /// Index of the cell [r_i, r_{i+1}] containing x (clamped).
    std::size_t cell_of(double x) const;
    double cell_width_at(double x) const;

    struct Row {
        std::vector<double> log_linear;    // log(a + r b)
        std::vector<double> log_quadratic; // log(a^2 + r b^2)
    };
    std::shared_ptr<const Row> row(FpsKey key) const;

private:
    explicit RGrid(const GridConfig& config);

    GridConfig config_;
    std::vector<double> r_;
    std::vector<double> log_r_;
    mutable std::shared_mutex cache_mutex_;
    mutable std::map<FpsKey, std::shared_ptr<const Row>> cache_;
};

struct PriorSpec {
    enum class Tag { Gamma, Fps, Uniform };
    Tag tag = Tag::Gamma;
    double k = 2.0;
    double theta = 2.0;
    FpsParameterSet fps;

    static PriorSpec gamma(double k = 2.0, double theta = 2.0);
    static PriorSpec fps_prior(FpsParameterSet params);
    static PriorSpec uniform();

    /// Unnormalized log prior density on each grid point.
    std::vector<double> log_density(const RGrid& grid) const;
    /// d/dr log prior (0 for FPS priors, which are folded into the parameters instead).
    double log_density_derivative(double r) const;

    void validate() const;
};

/// Adds the FPS log density of `params` to `out` pointwise. Uses the same arithmetic per
/// point as fps_log_density, so both routes agree bit for bit.
void add_fps_log_density(const RGrid& grid, const FpsParameterSet& params, std::span<double> out,
                         bool include_gamma = true);

class PosteriorGrid {
public:
    PosteriorGrid(std::shared_ptr<const RGrid> grid, std::vector<double> log_density);

    const RGrid& grid() const { return *grid_; }
    std::span<const double> r() const { return grid_->r(); }
    std::span<const double> log_density() const { return log_density_; }
    std::span<const double> density() const { return density_; }
    /// log of the normalization constant of exp(log_density).
    double log_normalizer() const { return log_normalizer_; }

    /// Set when an FPS prior has sum(alpha) <= 1: proper only because of truncation.
    bool truncation_only_proper = false;

private:
    std::shared_ptr<const RGrid> grid_;
    std::vector<double> log_density_;
    std::vector<double> density_;
    double log_normalizer_ = 0.0;
};

PosteriorGrid posterior(const PriorSpec& prior, const FpsParameterSet& params, std::shared_ptr<const RGrid> grid);

/// Trapezoid integral of samples on the grid.
double trapezoid(std::span<const double> x, std::span<const double> y);

struct PosteriorSummary {
    double mean = 0.0;
    double median = 0.0;
    double mode = 0.0;
    double variance = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double ci_mass = 0.95;
};

PosteriorSummary summarize(const PosteriorGrid& grid, double ci_mass = 0.95);

double posterior_mean(const PosteriorGrid& grid);
double posterior_quantile(const PosteriorGrid& grid, double q);
/// Grid argmax refined by a parabola through the log density at the neighboring points.
double posterior_mode(const PosteriorGrid& grid);

/// L1 distance between the posterior and a normal with its mean and variance.
double gaussian_fit_residual(const PosteriorGrid& grid);

/// Root of d/dr log(prior x FPS likelihood), bracketed around the grid argmax.
/// Throws NumericalError when the maximizer sits on the boundary of [0, R].
/// Parameter sets with gamma entries use the refined grid argmax.
double map_estimate(const FpsParameterSet& params, const PriorSpec& prior, std::shared_ptr<const RGrid> grid);
/// Same, reusing a posterior already computed from (prior, params).
double map_estimate(const PosteriorGrid& post, const FpsParameterSet& params, const PriorSpec& prior);

enum class Estimator { Mean, Median, Mode };

double estimate(const PosteriorGrid& grid, Estimator estimator);

/// Estimate after each prefix events[0..i]. The last entry is computed from the full
/// parameter set, so it equals estimate(posterior(prior, accumulate(events))) exactly.
std::vector<double> incremental_trace(const PriorSpec& prior, std::span<const SelectionEvent> events,
                                      Estimator estimator, std::shared_ptr<const RGrid> grid);

} // namespace moran
