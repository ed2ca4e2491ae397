#include "inference/posterior.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <mutex>
#include <numbers>

namespace moran {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kRowCacheLimit = 1024;

} // namespace

RGrid::RGrid(const GridConfig& config) : config_(config)
{
    if (config.points < 11)
        throw DomainError("grid needs at least 11 points");
    if (!(config.r_max > 0.0) || !std::isfinite(config.r_max))
        throw DomainError("grid r_max must be positive and finite");
    if (!(config.uniform_until > 0.0))
        throw DomainError("grid uniform_until must be positive");

    const std::size_t intervals = config.points - 1;
    r_.resize(config.points);
    if (config.r_max <= config.uniform_until) {
        for (std::size_t i = 0; i <= intervals; ++i)
            r_[i] = config.r_max * static_cast<double>(i) / static_cast<double>(intervals);
    } else {
        const std::size_t n_uniform = intervals / 2;
        const std::size_t n_log = intervals - n_uniform;
        const double u = config.uniform_until;
        for (std::size_t i = 0; i <= n_uniform; ++i)
            r_[i] = u * static_cast<double>(i) / static_cast<double>(n_uniform);
        const double log_span = std::log(config.r_max / u);
        for (std::size_t j = 1; j <= n_log; ++j)
            r_[n_uniform + j] = u * std::exp(log_span * static_cast<double>(j) / static_cast<double>(n_log));
    }
    r_.back() = config.r_max;

    log_r_.resize(r_.size());
    std::transform(r_.begin(), r_.end(), log_r_.begin(), [](double x) { return std::log(x); });
}

std::shared_ptr<const RGrid> RGrid::make(const GridConfig& config)
{
    return std::shared_ptr<const RGrid>(new RGrid(config));
}

std::size_t RGrid::cell_of(double x) const
{
    const auto it = std::upper_bound(r_.begin(), r_.end(), x);
    if (it == r_.begin())
        return 0;
    return std::min<std::size_t>(static_cast<std::size_t>(it - r_.begin()) - 1, r_.size() - 2);
}

double RGrid::cell_width_at(double x) const
{
    const auto i = cell_of(x);
    return r_[i + 1] - r_[i];
}

std::shared_ptr<const RGrid::Row> RGrid::row(FpsKey key) const
{
    {
        std::shared_lock lock(cache_mutex_);
        if (auto it = cache_.find(key); it != cache_.end())
            return it->second;
    }
    auto built = std::make_shared<Row>();
    const double a = static_cast<double>(key.a);
    const double b = static_cast<double>(key.M - key.a);
    built->log_linear.resize(r_.size());
    built->log_quadratic.resize(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i) {
        built->log_linear[i] = std::log(a + r_[i] * b);
        built->log_quadratic[i] = std::log(a * a + r_[i] * b * b);
    }
    std::unique_lock lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end())
        return it->second;
    if (cache_.size() >= kRowCacheLimit)
        return built;
    cache_.emplace(key, built);
    return built;
}

PriorSpec PriorSpec::gamma(double k, double theta)
{
    PriorSpec p;
    p.tag = Tag::Gamma;
    p.k = k;
    p.theta = theta;
    p.validate();
    return p;
}

PriorSpec PriorSpec::fps_prior(FpsParameterSet params)
{
    PriorSpec p;
    p.tag = Tag::Fps;
    p.fps = std::move(params);
    return p;
}

PriorSpec PriorSpec::uniform()
{
    PriorSpec p;
    p.tag = Tag::Uniform;
    return p;
}

void PriorSpec::validate() const
{
    if (tag == Tag::Gamma && !(k > 0.0 && theta > 0.0 && std::isfinite(k) && std::isfinite(theta)))
        throw DomainError(fmt::format("gamma prior needs k > 0 and theta > 0, got k={} theta={}", k, theta));
}

std::vector<double> PriorSpec::log_density(const RGrid& grid) const
{
    validate();
    const auto r = grid.r();
    const auto log_r = grid.log_r();
    std::vector<double> out(r.size(), 0.0);
    switch (tag) {
    case Tag::Uniform: break;
    case Tag::Gamma:
        for (std::size_t i = 1; i < r.size(); ++i)
            out[i] = (k - 1.0) * log_r[i] - r[i] / theta;
        // The r = 0 endpoint: zero density for k > 1, finite for k = 1; the integrable
        // singularity for k < 1 is represented by the first interior value.
        out[0] = k > 1.0 ? kNegInf : (k == 1.0 ? 0.0 : out[1]);
        break;
    case Tag::Fps: add_fps_log_density(grid, fps, out); break;
    }
    return out;
}

double PriorSpec::log_density_derivative(double r) const
{
    if (tag == Tag::Gamma)
        return (k - 1.0) / r - 1.0 / theta;
    return 0.0;
}

void add_fps_log_density(const RGrid& grid, const FpsParameterSet& params, std::span<double> out, bool include_gamma)
{
    const auto log_r = grid.log_r();
    const std::size_t n = grid.size();
    if (out.size() != n)
        throw DomainError("add_fps_log_density: output size does not match grid");

    // Accumulate the FPS part from zero, key by key, exactly like the scalar route.
    std::vector<double> fps(n, 0.0);
    for (const auto& [key, c] : params.entries()) {
        const auto row = grid.row(key);
        const double gamma = include_gamma ? c.gamma : 0.0;
        const double total = c.alpha + c.beta + gamma;
        // r = 0 endpoint: the log r term is -inf when beta > 0 and absent otherwise.
        if (c.beta > 0.0)
            fps[0] = kNegInf;
        else if (fps[0] != kNegInf)
            fps[0] += -total * row->log_linear[0] + gamma * row->log_quadratic[0];
        for (std::size_t i = 1; i < n; ++i) {
            fps[i] += c.beta * log_r[i] - total * row->log_linear[i];
            if (gamma != 0.0)
                fps[i] += gamma * row->log_quadratic[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] += fps[i];
}

double trapezoid(std::span<const double> x, std::span<const double> y)
{
    double total = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        total += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return total;
}

PosteriorGrid::PosteriorGrid(std::shared_ptr<const RGrid> grid, std::vector<double> log_density)
    : grid_(std::move(grid)), log_density_(std::move(log_density))
{
    if (!grid_ || log_density_.size() != grid_->size())
        throw DomainError("posterior grid size mismatch");

    double max_log = kNegInf;
    for (double v : log_density_) {
        if (std::isnan(v))
            throw NumericalError("posterior log density is NaN");
        if (v == std::numeric_limits<double>::infinity())
            throw NumericalError("posterior log density overflowed to +inf");
        max_log = std::max(max_log, v);
    }
    if (max_log == kNegInf)
        throw NumericalError("all posterior mass is below the underflow floor exp(-745)");

    density_.resize(log_density_.size());
    for (std::size_t i = 0; i < density_.size(); ++i)
        density_[i] = std::exp(log_density_[i] - max_log);
    const double mass = trapezoid(grid_->r(), density_);
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw NumericalError("posterior mass vanished after max-shift (underflow floor exp(-745))");
    for (double& d : density_)
        d /= mass;
    log_normalizer_ = max_log + std::log(mass);
}

PosteriorGrid posterior(const PriorSpec& prior, const FpsParameterSet& params, std::shared_ptr<const RGrid> grid)
{
    if (!grid)
        throw DomainError("posterior: null grid");
    std::vector<double> log_density(grid->size(), 0.0);
    add_fps_log_density(*grid, params, log_density);
    const auto log_prior = prior.log_density(*grid);
    for (std::size_t i = 0; i < log_density.size(); ++i)
        log_density[i] += log_prior[i];
    PosteriorGrid result(std::move(grid), std::move(log_density));
    result.truncation_only_proper = prior.tag == PriorSpec::Tag::Fps && !prior.fps.proper_on_half_line();
    return result;
}

double posterior_mean(const PosteriorGrid& g)
{
    const auto r = g.r();
    const auto d = g.density();
    double total = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i)
        total += 0.5 * (r[i] - r[i - 1]) * (r[i] * d[i] + r[i - 1] * d[i - 1]);
    return total;
}

double posterior_quantile(const PosteriorGrid& g, double q)
{
    if (!(q >= 0.0 && q <= 1.0))
        throw DomainError("quantile level must lie in [0, 1]");
    const auto r = g.r();
    const auto d = g.density();
    double cdf = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        const double next = cdf + 0.5 * (r[i] - r[i - 1]) * (d[i] + d[i - 1]);
        if (next >= q) {
            const double t = next > cdf ? (q - cdf) / (next - cdf) : 0.0;
            return r[i - 1] + t * (r[i] - r[i - 1]);
        }
        cdf = next;
    }
    return r.back();
}

namespace {

std::size_t argmax(std::span<const double> v)
{
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2)
{
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    if (!(curvature < 0.0))
        return x1;
    // y = y1 + d(x - x1) + c (x - x1)^2 with the slope at x1 from the divided differences.
    const double slope_at_x1 = d01 + curvature * (x1 - x0);
    const double vertex = x1 - slope_at_x1 / (2.0 * curvature);
    return std::clamp(vertex, x0, x2);
}

double refined_argmax(const PosteriorGrid& g)
{
    const auto r = g.r();
    const auto ld = g.log_density();
    const auto i = argmax(ld);
    if (i == 0 || i + 1 == r.size())
        return r[i];
    if (!std::isfinite(ld[i - 1]) || !std::isfinite(ld[i + 1]))
        return r[i];
    return parabola_vertex(r[i - 1], ld[i - 1], r[i], ld[i], r[i + 1], ld[i + 1]);
}

} // namespace

double posterior_mode(const PosteriorGrid& g)
{
    return refined_argmax(g);
}

PosteriorSummary summarize(const PosteriorGrid& g, double ci_mass)
{
    if (!(ci_mass > 0.0 && ci_mass < 1.0))
        throw DomainError("credible mass must lie in (0, 1)");
    PosteriorSummary s;
    s.mean = posterior_mean(g);
    s.median = posterior_quantile(g, 0.5);
    s.mode = posterior_mode(g);
    const auto r = g.r();
    const auto d = g.density();
    double second = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        const double a = r[i - 1] - s.mean;
        const double b = r[i] - s.mean;
        second += 0.5 * (r[i] - r[i - 1]) * (a * a * d[i - 1] + b * b * d[i]);
    }
    s.variance = second;
    s.ci_mass = ci_mass;
    s.ci_lo = posterior_quantile(g, 0.5 * (1.0 - ci_mass));
    s.ci_hi = posterior_quantile(g, 0.5 * (1.0 + ci_mass));
    return s;
}

double gaussian_fit_residual(const PosteriorGrid& g)
{
    const auto s = summarize(g);
    if (!(s.variance > 0.0))
        return 2.0;
    const auto r = g.r();
    const auto d = g.density();
    const double sd = std::sqrt(s.variance);
    std::vector<double> diff(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double z = (r[i] - s.mean) / sd;
        const double normal = std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
        diff[i] = std::abs(d[i] - normal);
    }
    return trapezoid(r, diff);
}

double estimate(const PosteriorGrid& g, Estimator estimator)
{
    switch (estimator) {
    case Estimator::Mean: return posterior_mean(g);
    case Estimator::Median: return posterior_quantile(g, 0.5);
    case Estimator::Mode: return posterior_mode(g);
    }
    return posterior_mean(g);
}

double map_estimate(const FpsParameterSet& params, const PriorSpec& prior, std::shared_ptr<const RGrid> grid)
{
    return map_estimate(posterior(prior, params, std::move(grid)), params, prior);
}

double map_estimate(const PosteriorGrid& post, const FpsParameterSet& params, const PriorSpec& prior)
{
    FpsParameterSet combined = params;
    if (prior.tag == PriorSpec::Tag::Fps)
        combined += prior.fps;

    const auto r = post.r();
    const auto i = argmax(post.log_density());
    if (i == 0 || i + 1 == r.size())
        throw NumericalError(fmt::format(
            "posterior maximizer lies on the boundary r = {} (one-sided evidence: sum(alpha)={}, sum(beta)={}); "
            "use the posterior mean with an informative prior instead",
            r[i], combined.total_alpha(), combined.total_beta()));

    if (combined.has_gamma())
        return refined_argmax(post);

    auto slope = [&](double x) { return fps_log_density_derivative(combined, x) + prior.log_density_derivative(x); };

    std::size_t lo_index = i - 1;
    std::size_t hi_index = i + 1;
    const double tiny = r[1] * 1e-9;
    auto lo = [&] { return std::max(r[lo_index], tiny); };
    while (slope(lo()) <= 0.0 && lo_index > 0)
        --lo_index;
    while (slope(r[hi_index]) >= 0.0 && hi_index + 1 < r.size())
        ++hi_index;
    const double f_lo = slope(lo());
    const double f_hi = slope(r[hi_index]);
    if (!(f_lo > 0.0 && f_hi < 0.0))
        return refined_argmax(post);

    boost::uintmax_t max_iter = 200;
    const auto root = boost::math::tools::toms748_solve(slope, lo(), r[hi_index], f_lo, f_hi,
                                                        boost::math::tools::eps_tolerance<double>(45), max_iter);
    return 0.5 * (root.first + root.second);
}

std::vector<double> incremental_trace(const PriorSpec& prior, std::span<const SelectionEvent> events,
                                      Estimator estimator, std::shared_ptr<const RGrid> grid)
{
    std::vector<double> trace;
    trace.reserve(events.size());
    if (events.empty())
        return trace;

    const std::size_t n = grid->size();
    const auto log_prior = prior.log_density(*grid);
    std::vector<double> fps(n, 0.0);

    std::vector<double> running(n);
    double current = 0.0;
    bool have_current = false;
    for (std::size_t e = 0; e + 1 < events.size(); ++e) {
        FpsParameterSet single;
        if (accumulate_event(single, events[e]) || !have_current) {
            add_fps_log_density(*grid, single, fps);
            for (std::size_t i = 0; i < n; ++i)
                running[i] = fps[i] + log_prior[i];
            current = estimate(PosteriorGrid(grid, running), estimator);
            have_current = true;
        }
        trace.push_back(current);
    }
    trace.push_back(estimate(posterior(prior, accumulate(events), grid), estimator));
    return trace;
}

} // namespace moran
