#include "harness/experiments.hpp"

#include "core/errors.hpp"
#include "core/process.hpp"
#include "core/random.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

namespace moran {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename T>
T get_or(const Json& j, const char* key, T fallback)
{
    const auto it = j.find(key);
    return it == j.end() || it->is_null() ? fallback : it->template get<T>();
}

template <typename F>
auto guarded(const char* what, F&& f)
{
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("invalid {} request: {}", what, e.what()));
    }
}

/// Rejects keys the request does not know, so typos in config files surface.
void check_keys(const Json& j, std::initializer_list<const char*> known, const char* what)
{
    if (!j.is_object())
        throw ParseError(fmt::format("{} request must be a JSON object", what));
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            throw ParseError(fmt::format("unknown {} field '{}'", what, key));
    }
}

std::int64_t as_i64(std::size_t v) { return static_cast<std::int64_t>(v); }
std::int64_t as_i64(std::uint64_t v, int) { return static_cast<std::int64_t>(v); }

Model model_or_default(const Json& j, const char* key)
{
    return j.contains(key) ? model_from_json(j.at(key)) : Model{WellMixedModel{}};
}

EstimateKind estimate_kind_of(Estimator e)
{
    switch (e) {
    case Estimator::Mean: return EstimateKind::Mean;
    case Estimator::Median: return EstimateKind::Median;
    case Estimator::Mode: return EstimateKind::Mode;
    }
    return EstimateKind::Mean;
}

std::uint64_t resolved_max_steps(std::uint64_t requested, std::int64_t N)
{
    return requested ? requested : default_max_steps(N);
}

PopulationState start_counts(const PreparedModel& prepared)
{
    if (const auto* s = std::get_if<PopulationState>(&prepared.init()))
        return *s;
    return initial_occupancy(prepared.topology(), std::get<Layout>(prepared.init())).counts();
}

} // namespace

// ---- single-log inference ---------------------------------------------------------

InferenceResult infer_events(std::span<const SelectionEvent> events, const InferenceConfig& config,
                             const std::shared_ptr<const RGrid>& grid)
{
    InferenceResult res;
    for (const auto& e : events)
        if (accumulate_event(res.params, e))
            ++res.n_events;
    res.counting = counting_estimate(res.params, config.pseudocount);
    res.inverse_counting = inverse_counting_estimate(events);

    auto post = posterior(config.prior, res.params, grid);
    res.summary = summarize(post, config.ci_mass);
    if (config.diagnostics)
        res.gaussian_residual = gaussian_fit_residual(post);
    if (config.compute_map) {
        try {
            res.map = map_estimate(post, res.params, config.prior);
        } catch (const NumericalError& e) {
            res.map_error = e.what();
        }
    }
    res.posterior = std::move(post);
    return res;
}

InferenceResult infer_log(const EventLog& log, const InferenceConfig& config, const std::shared_ptr<const RGrid>& grid,
                          std::size_t sample_size, std::uint64_t sample_seed)
{
    if (sample_size == 0)
        return infer_events(log.events, config, grid);
    const auto sampled = sample_events(log, sample_size, sample_seed);
    return infer_events(sampled, config, grid);
}

namespace {

Json ratio_json(const RatioEstimate& e)
{
    Json j;
    j["status"] = std::string(to_string(e.status));
    if (e.usable())
        j["value"] = e.value;
    else
        j["value"] = nullptr;
    return j;
}

} // namespace

Json inference_to_json(const InferenceResult& r)
{
    Json j;
    j["mean"] = r.summary.mean;
    j["median"] = r.summary.median;
    j["mode"] = r.summary.mode;
    if (r.map)
        j["map"] = *r.map;
    else
        j["map"] = nullptr;
    if (!r.map_error.empty())
        j["map_error"] = r.map_error;
    j["ci_lo"] = r.summary.ci_lo;
    j["ci_hi"] = r.summary.ci_hi;
    j["ci_mass"] = r.summary.ci_mass;
    j["variance"] = r.summary.variance;
    j["counting"] = ratio_json(r.counting);
    j["inverse_counting"] = ratio_json(r.inverse_counting);
    j["n_events"] = r.n_events;
    j["sum_alpha"] = r.params.total_alpha();
    j["sum_beta"] = r.params.total_beta();
    j["sum_gamma"] = r.params.total_gamma();
    j["gaussian_fit_residual"] = r.gaussian_residual;
    j["truncation_only_proper"] = r.posterior && r.posterior->truncation_only_proper;
    return j;
}

std::string posterior_csv(const PosteriorGrid& post)
{
    std::string out = csv_schema_line() + "\n# kind: posterior\nr,density\n";
    const auto r = post.r();
    const auto d = post.density();
    for (std::size_t i = 0; i < r.size(); ++i)
        out += format_number(r[i]) + ',' + format_number(d[i]) + '\n';
    return out;
}

Json inference_config_to_json(const InferenceConfig& c)
{
    Json j;
    j["prior"] = prior_to_json(c.prior);
    j["grid"] = grid_to_json(c.grid);
    j["ci_mass"] = c.ci_mass;
    j["pseudocount"] = c.pseudocount;
    return j;
}

InferenceConfig inference_config_from_json(const Json& j)
{
    return guarded("inference", [&] {
        check_keys(j, {"prior", "grid", "ci_mass", "pseudocount"}, "inference");
        InferenceConfig c;
        if (j.contains("prior")) {
            const auto& p = j.at("prior");
            c.prior = p.is_string() ? parse_prior(p.get<std::string>()) : prior_from_json(p);
        }
        c.prior.validate();
        if (j.contains("grid"))
            c.grid = grid_from_json(j.at("grid"));
        if (c.grid.points < 3 || !(c.grid.r_max > 0.0))
            throw DomainError("grid needs at least 3 points and a positive r_max");
        c.ci_mass = get_or<double>(j, "ci_mass", c.ci_mass);
        if (!(c.ci_mass > 0.0 && c.ci_mass < 1.0))
            throw DomainError("ci_mass must lie in (0, 1)");
        c.pseudocount = get_or<double>(j, "pseudocount", c.pseudocount);
        if (!(c.pseudocount >= 0.0))
            throw DomainError("pseudocount must be nonnegative");
        return c;
    });
}

Json infer_request_to_json(const InferRequest& r)
{
    Json j = inference_config_to_json(r.inference);
    j["sample_size"] = r.sample_size;
    j["sample_seed"] = r.sample_seed;
    return j;
}

InferRequest infer_request_from_json(const Json& j)
{
    return guarded("infer", [&] {
        InferRequest r;
        Json config = j.is_null() ? Json::object() : j;
        r.sample_size = get_or<std::size_t>(config, "sample_size", 0);
        r.sample_seed = get_or<std::uint64_t>(config, "sample_seed", 0);
        config.erase("sample_size");
        config.erase("sample_seed");
        r.inference = inference_config_from_json(config);
        return r;
    });
}

Report infer_report(const EventLog& log, const InferRequest& request, const InferenceResult& result)
{
    Report rep;
    rep.kind = "infer";
    rep.spec = infer_request_to_json(request);
    Json source;
    source["model"] = model_to_json(log.model);
    source["init"] = init_to_json(log.init);
    source["seed"] = log.seed;
    source["events"] = log.events.size();
    source["outcome"] = std::string(to_string(log.outcome));
    rep.spec["log"] = std::move(source);
    rep.summary = inference_to_json(result);

    const auto ratio_value = [](const RatioEstimate& e) { return e.usable() ? e.value : kNaN; };
    rep.table.columns = {"mean",  "median",   "mode",     "map",
                         "ci_lo", "ci_hi",    "counting", "counting_status",
                         "inverse_counting",  "inverse_counting_status", "n_events"};
    rep.table.add_row({result.summary.mean, result.summary.median, result.summary.mode, result.map.value_or(kNaN),
                       result.summary.ci_lo, result.summary.ci_hi, ratio_value(result.counting),
                       std::string(to_string(result.counting.status)), ratio_value(result.inverse_counting),
                       std::string(to_string(result.inverse_counting.status)), as_i64(result.n_events)});
    return rep;
}

// ---- per-trajectory estimates -----------------------------------------------------

std::string_view to_string(EstimateKind kind)
{
    switch (kind) {
    case EstimateKind::Counting: return "counting";
    case EstimateKind::InverseCounting: return "inverse-counting";
    case EstimateKind::Mean: return "mean";
    case EstimateKind::Median: return "median";
    case EstimateKind::Mode: return "mode";
    case EstimateKind::Map: return "map";
    }
    return "mean";
}

EstimateKind parse_estimate_kind(const std::string& name)
{
    for (auto k : {EstimateKind::Counting, EstimateKind::InverseCounting, EstimateKind::Mean, EstimateKind::Median,
                   EstimateKind::Mode, EstimateKind::Map})
        if (to_string(k) == name)
            return k;
    throw ParseError(
        fmt::format("unknown estimator '{}' (counting, inverse-counting, mean, median, mode, map)", name));
}

std::uint64_t sample_seed_for(std::uint64_t trajectory_seed) { return derive_seed(trajectory_seed, 0x53414D50u); }

TrajectoryEstimates estimate_trajectory(const EventLog& log, const InferenceConfig& config,
                                        const std::shared_ptr<const RGrid>& grid, std::span<const EstimateKind> kinds,
                                        std::size_t sample_size)
{
    TrajectoryEstimates out;
    out.outline = {log.steps, log.outcome};
    out.value.fill(kNaN);

    std::vector<SelectionEvent> sampled;
    std::span<const SelectionEvent> events = log.events;
    if (sample_size > 0) {
        sampled = sample_events(log, sample_size, sample_seed_for(log.seed));
        events = sampled;
    }

    auto wants = [&](EstimateKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
    auto slot = [&](EstimateKind k) -> double& { return out.value[static_cast<std::size_t>(k)]; };

    const auto params = accumulate(events);
    if (wants(EstimateKind::Counting)) {
        const auto c = counting_estimate(params, config.pseudocount);
        if (c.usable())
            slot(EstimateKind::Counting) = c.value;
    }
    if (wants(EstimateKind::InverseCounting)) {
        const auto c = inverse_counting_estimate(events);
        if (c.usable())
            slot(EstimateKind::InverseCounting) = c.value;
    }
    const bool bayes = wants(EstimateKind::Mean) || wants(EstimateKind::Median) || wants(EstimateKind::Mode) ||
                       wants(EstimateKind::Map);
    if (!bayes)
        return out;
    try {
        const auto post = posterior(config.prior, params, grid);
        if (wants(EstimateKind::Mean))
            slot(EstimateKind::Mean) = posterior_mean(post);
        if (wants(EstimateKind::Median))
            slot(EstimateKind::Median) = posterior_quantile(post, 0.5);
        if (wants(EstimateKind::Mode))
            slot(EstimateKind::Mode) = posterior_mode(post);
        if (wants(EstimateKind::Map)) {
            try {
                slot(EstimateKind::Map) = map_estimate(post, params, config.prior);
            } catch (const NumericalError&) {
            }
        }
    } catch (const NumericalError&) {
    }
    return out;
}

EstimatorStats estimator_stats(EstimateKind kind, std::span<const TrajectoryEstimates> runs, double r_true)
{
    EstimatorStats s;
    s.kind = kind;
    s.n = runs.size();
    double sum = 0.0;
    double sq_err = 0.0;
    for (const auto& run : runs) {
        const double v = run.value[static_cast<std::size_t>(kind)];
        if (std::isnan(v))
            continue;
        ++s.n_success;
        sum += v;
        sq_err += (v - r_true) * (v - r_true);
    }
    s.failures = s.n - s.n_success;
    if (s.n_success == 0) {
        s.mean = s.stddev = s.bias = s.mse = kNaN;
        return s;
    }
    s.mean = sum / static_cast<double>(s.n_success);
    double ss = 0.0;
    for (const auto& run : runs) {
        const double v = run.value[static_cast<std::size_t>(kind)];
        if (!std::isnan(v))
            ss += (v - s.mean) * (v - s.mean);
    }
    s.stddev = s.n_success > 1 ? std::sqrt(ss / static_cast<double>(s.n_success - 1)) : 0.0;
    s.bias = s.mean - r_true;
    s.mse = sq_err / static_cast<double>(s.n_success);
    return s;
}

// ---- initial conditions -----------------------------------------------------------

std::int64_t balanced_a(std::int64_t N, double r)
{
    if (N < 2 || !(r >= 0.0))
        throw DomainError("balanced start needs N >= 2 and r >= 0");
    const auto a = static_cast<std::int64_t>(std::llround(static_cast<double>(N) * r / (r + 1.0)));
    return std::clamp<std::int64_t>(a, 1, N - 1);
}

std::string_view to_string(InitRule::Tag tag)
{
    switch (tag) {
    case InitRule::Tag::SingleMutant: return "single-mutant";
    case InitRule::Tag::Balanced: return "balanced";
    case InitRule::Tag::Explicit: return "explicit";
    case InitRule::Tag::GraphLayout: return "graph-layout";
    }
    return "balanced";
}

InitialCondition InitRule::resolve(std::int64_t N, double r, bool graph) const
{
    std::int64_t count = 0;
    switch (tag) {
    case Tag::SingleMutant: count = 1; break;
    case Tag::Balanced: count = balanced_a(N, r); break;
    case Tag::Explicit: count = a; break;
    case Tag::GraphLayout:
        if (!graph)
            throw DomainError("graph-layout initial condition needs a graph model");
        return layout;
    }
    if (count <= 0 || count >= N)
        throw DomainError(fmt::format("initial A count {} is not interior for N = {}", count, N));
    if (graph)
        return Layout{Layout::Tag::CountsAtRandom, count, layout.seed};
    return PopulationState{count, N - count};
}

namespace {

Json init_rule_to_json(const InitRule& rule)
{
    Json j;
    j["rule"] = std::string(to_string(rule.tag));
    if (rule.tag == InitRule::Tag::Explicit)
        j["a"] = rule.a;
    if (rule.tag == InitRule::Tag::GraphLayout)
        j["layout"] = init_to_json(rule.layout);
    else if (rule.layout.seed != 0)
        j["layout_seed"] = rule.layout.seed;
    return j;
}

InitRule init_rule_from_json(const Json& j)
{
    check_keys(j, {"rule", "a", "layout", "layout_seed"}, "init");
    InitRule rule;
    const auto name = get_or<std::string>(j, "rule", "balanced");
    bool found = false;
    for (auto t : {InitRule::Tag::SingleMutant, InitRule::Tag::Balanced, InitRule::Tag::Explicit,
                   InitRule::Tag::GraphLayout})
        if (to_string(t) == name) {
            rule.tag = t;
            found = true;
        }
    if (!found)
        throw ParseError(
            fmt::format("unknown init rule '{}' (single-mutant, balanced, explicit, graph-layout)", name));
    rule.a = get_or<std::int64_t>(j, "a", 0);
    if (rule.tag == InitRule::Tag::Explicit && rule.a <= 0)
        throw ParseError("explicit init rule needs a positive 'a'");
    if (rule.tag == InitRule::Tag::GraphLayout) {
        const auto init = init_from_json(j.at("layout"));
        if (!std::holds_alternative<Layout>(init))
            throw ParseError("graph-layout init rule needs a layout object");
        rule.layout = std::get<Layout>(init);
    }
    rule.layout.seed = get_or<std::uint64_t>(j, "layout_seed", rule.layout.seed);
    return rule;
}

std::vector<EstimateKind> default_estimators()
{
    return {EstimateKind::Counting, EstimateKind::InverseCounting, EstimateKind::Mean, EstimateKind::Median,
            EstimateKind::Mode};
}

std::vector<double> ladder(double lo, double hi, double step)
{
    std::vector<double> out;
    const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i)
        out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    return out;
}

} // namespace

Model with_size(Model model, std::int64_t N)
{
    if (auto* gm = std::get_if<GraphModel>(&model))
        gm->graph.n_vertices = N;
    return model;
}

// ---- sweep ------------------------------------------------------------------------

SweepSpec SweepSpec::defaults()
{
    SweepSpec s;
    for (std::int64_t n = 3; n <= 30; n += 3)
        s.n_values.push_back(n);
    s.r_values = ladder(0.1, 2.0, 0.1);
    s.estimators = default_estimators();
    return s;
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t index) { return derive_seed(base_seed, index); }

CellSummary run_cell(const SweepSpec& spec, std::int64_t N, double r, std::uint64_t seed, unsigned threads,
                     const std::shared_ptr<const RGrid>& grid)
{
    CellSummary cell;
    cell.N = N;
    cell.r_true = r;
    cell.cell_seed = seed;
    try {
        const Model model = with_size(spec.model, N);
        const bool graph = std::holds_alternative<GraphModel>(model);
        const PreparedModel prepared(model, spec.init.resolve(N, r, graph));
        cell.start = start_counts(prepared);

        std::vector<TrajectoryEstimates> runs(spec.trajectories);
        const BatchConfig batch{seed, 0, spec.trajectories, resolved_max_steps(spec.max_steps, N), threads};
        run_batch_streamed(prepared, r, batch, [&](std::size_t i, EventLog&& log) {
            runs[i] = estimate_trajectory(log, spec.inference, grid, spec.estimators, spec.sample_size);
        });

        std::vector<TrajectoryOutline> outlines;
        outlines.reserve(runs.size());
        for (const auto& run : runs)
            outlines.push_back(run.outline);
        cell.trajectories = trajectory_stats(outlines);
        for (auto kind : spec.estimators)
            cell.estimators.push_back(estimator_stats(kind, runs, r));
    } catch (const std::exception& e) {
        cell.error = e.what();
        cell.estimators.clear();
    }
    return cell;
}

std::vector<CellSummary> run_sweep(const SweepSpec& spec, unsigned threads)
{
    const auto grid = RGrid::make(spec.inference.grid);
    std::vector<CellSummary> cells;
    cells.reserve(spec.n_values.size() * spec.r_values.size());
    std::size_t index = 0;
    for (auto N : spec.n_values)
        for (auto r : spec.r_values)
            cells.push_back(run_cell(spec, N, r, cell_seed(spec.base_seed, index++), threads, grid));
    return cells;
}

Json sweep_spec_to_json(const SweepSpec& s)
{
    Json j;
    j["model"] = model_to_json(s.model);
    j["n_values"] = s.n_values;
    j["r_values"] = s.r_values;
    j["init"] = init_rule_to_json(s.init);
    j["trajectories"] = s.trajectories;
    j["sample_size"] = s.sample_size;
    j["inference"] = inference_config_to_json(s.inference);
    Json est = Json::array();
    for (auto k : s.estimators)
        est.push_back(std::string(to_string(k)));
    j["estimators"] = std::move(est);
    j["seed"] = s.base_seed;
    j["max_steps"] = s.max_steps;
    return j;
}

SweepSpec sweep_spec_from_json(const Json& j)
{
    return guarded("sweep", [&] {
        check_keys(j,
                   {"model", "n_values", "r_values", "init", "trajectories", "sample_size", "inference", "estimators",
                    "seed", "max_steps"},
                   "sweep");
        SweepSpec s = SweepSpec::defaults();
        s.model = model_or_default(j, "model");
        if (j.contains("n_values"))
            s.n_values = j.at("n_values").get<std::vector<std::int64_t>>();
        if (j.contains("r_values"))
            s.r_values = j.at("r_values").get<std::vector<double>>();
        if (j.contains("init"))
            s.init = init_rule_from_json(j.at("init"));
        s.trajectories = get_or<std::size_t>(j, "trajectories", s.trajectories);
        s.sample_size = get_or<std::size_t>(j, "sample_size", s.sample_size);
        if (j.contains("inference"))
            s.inference = inference_config_from_json(j.at("inference"));
        if (j.contains("estimators")) {
            s.estimators.clear();
            for (const auto& e : j.at("estimators"))
                s.estimators.push_back(parse_estimate_kind(e.get<std::string>()));
        }
        s.base_seed = get_or<std::uint64_t>(j, "seed", s.base_seed);
        s.max_steps = get_or<std::uint64_t>(j, "max_steps", s.max_steps);
        if (s.n_values.empty() || s.r_values.empty())
            throw DomainError("sweep needs at least one N and one r");
        if (s.trajectories == 0)
            throw DomainError("sweep needs at least one trajectory per cell");
        if (s.estimators.empty())
            throw DomainError("sweep needs at least one estimator");
        for (double r : s.r_values)
            if (!(r >= 0.0) || !std::isfinite(r))
                throw DomainError(fmt::format("invalid r value {}", r));
        return s;
    });
}

Report sweep_report(const SweepSpec& spec, std::span<const CellSummary> cells)
{
    Report rep;
    rep.kind = "sweep";
    rep.spec = sweep_spec_to_json(spec);
    rep.table.columns = {"N",         "r",          "a0",          "b0",          "estimator",
                         "n",         "n_success",  "failures",    "failure_rate", "mean",
                         "std",       "bias",       "mse",         "mean_length", "std_length",
                         "mean_length_fixated",     "fixated_a_fraction",         "fixated_b_fraction",
                         "truncated", "cell_seed",  "error"};
    for (const auto& c : cells) {
        const auto& t = c.trajectories;
        auto row = [&](std::string estimator, const EstimatorStats& s) {
            const double rate = s.n ? static_cast<double>(s.failures) / static_cast<double>(s.n) : kNaN;
            rep.table.add_row({c.N, c.r_true, c.start.a, c.start.b, std::move(estimator), as_i64(s.n),
                               as_i64(s.n_success), as_i64(s.failures), rate, s.mean, s.stddev, s.bias, s.mse,
                               t.mean_length, t.std_length, t.mean_length_fixated, t.fixated_a_fraction,
                               t.fixated_b_fraction, as_i64(t.truncated), fmt::format("{}", c.cell_seed), c.error});
        };
        if (!c.error.empty()) {
            EstimatorStats empty;
            empty.mean = empty.stddev = empty.bias = empty.mse = kNaN;
            for (auto kind : spec.estimators)
                row(std::string(to_string(kind)), empty);
            continue;
        }
        for (const auto& s : c.estimators)
            row(std::string(to_string(s.kind)), s);
    }
    return rep;
}

// ---- histogram --------------------------------------------------------------------

HistogramResult run_histogram(const HistogramSpec& spec, unsigned threads)
{
    if (!(spec.bin_width > 0.0))
        throw DomainError("bin width must be positive");
    const auto grid = RGrid::make(spec.inference.grid);
    const PreparedModel prepared(spec.model, spec.init);
    const auto N = prepared.initial_size();

    const std::array kinds{estimate_kind_of(spec.estimator)};
    std::vector<TrajectoryEstimates> runs(spec.trajectories);
    const BatchConfig batch{spec.base_seed, 0, spec.trajectories, resolved_max_steps(spec.max_steps, N), threads};
    run_batch_streamed(prepared, spec.r, batch, [&](std::size_t i, EventLog&& log) {
        runs[i] = estimate_trajectory(log, spec.inference, grid, kinds, spec.sample_size);
    });

    HistogramResult res;
    res.bin_width = spec.bin_width;
    const auto n_bins = static_cast<std::size_t>(std::ceil(spec.inference.grid.r_max / spec.bin_width - 1e-9));
    res.counts.assign(std::max<std::size_t>(n_bins, 1), 0);
    std::vector<TrajectoryOutline> outlines;
    std::size_t below = 0;
    for (const auto& run : runs) {
        outlines.push_back(run.outline);
        const double v = run.value[static_cast<std::size_t>(kinds[0])];
        res.estimates.push_back(v);
        if (std::isnan(v))
            continue;
        const auto bin = std::min(static_cast<std::size_t>(std::max(v, 0.0) / spec.bin_width), res.counts.size() - 1);
        ++res.counts[bin];
        if (v < 1.0)
            ++below;
    }
    const auto stats = estimator_stats(kinds[0], runs, spec.r);
    res.failures = stats.failures;
    res.mean = stats.mean;
    res.stddev = stats.stddev;
    res.fraction_below_one =
        stats.n_success ? static_cast<double>(below) / static_cast<double>(stats.n_success) : kNaN;
    res.trajectories = trajectory_stats(outlines);
    return res;
}

Json histogram_spec_to_json(const HistogramSpec& s)
{
    Json j;
    j["model"] = model_to_json(s.model);
    j["init"] = init_to_json(s.init);
    j["r"] = s.r;
    j["trajectories"] = s.trajectories;
    j["sample_size"] = s.sample_size;
    j["inference"] = inference_config_to_json(s.inference);
    j["estimator"] = std::string(to_string(s.estimator));
    j["bin_width"] = s.bin_width;
    j["seed"] = s.base_seed;
    j["max_steps"] = s.max_steps;
    return j;
}

HistogramSpec histogram_spec_from_json(const Json& j)
{
    return guarded("histogram", [&] {
        check_keys(j,
                   {"model", "init", "r", "trajectories", "sample_size", "inference", "estimator", "bin_width", "seed",
                    "max_steps"},
                   "histogram");
        HistogramSpec s;
        s.model = model_or_default(j, "model");
        if (j.contains("init"))
            s.init = init_from_json(j.at("init"));
        s.r = get_or<double>(j, "r", s.r);
        s.trajectories = get_or<std::size_t>(j, "trajectories", s.trajectories);
        s.sample_size = get_or<std::size_t>(j, "sample_size", s.sample_size);
        if (j.contains("inference"))
            s.inference = inference_config_from_json(j.at("inference"));
        if (j.contains("estimator"))
            s.estimator = parse_estimator(j.at("estimator").get<std::string>());
        s.bin_width = get_or<double>(j, "bin_width", s.bin_width);
        s.base_seed = get_or<std::uint64_t>(j, "seed", s.base_seed);
        s.max_steps = get_or<std::uint64_t>(j, "max_steps", s.max_steps);
        if (s.trajectories == 0)
            throw DomainError("histogram needs at least one trajectory");
        return s;
    });
}

Report histogram_report(const HistogramSpec& spec, const HistogramResult& res)
{
    Report rep;
    rep.kind = "histogram";
    rep.spec = histogram_spec_to_json(spec);
    rep.summary["n"] = res.estimates.size();
    rep.summary["failures"] = res.failures;
    rep.summary["mean"] = res.mean;
    rep.summary["std"] = res.stddev;
    rep.summary["fraction_below_one"] = res.fraction_below_one;
    rep.summary["mean_length"] = res.trajectories.mean_length;
    rep.summary["truncated"] = res.trajectories.truncated;
    rep.table.columns = {"bin_lo", "bin_hi", "count"};
    for (std::size_t b = 0; b < res.counts.size(); ++b) {
        const double lo = std::round(static_cast<double>(b) * res.bin_width * 1e12) / 1e12;
        const double hi = std::round(static_cast<double>(b + 1) * res.bin_width * 1e12) / 1e12;
        rep.table.add_row({lo, hi, as_i64(res.counts[b])});
    }
    Json est = Json::array();
    for (double v : res.estimates)
        est.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
    rep.extra["estimates"] = std::move(est);
    return rep;
}

// ---- graph comparison -------------------------------------------------------------

std::vector<GraphEntry> GraphCompareSpec::default_graphs(std::int64_t N)
{
    const auto half = N / 2;
    return {
        {"complete", {GraphKind::Complete, N, 0, 1.0, 0}, {Layout::Tag::CountsAtRandom, half, 0}},
        {"cycle", {GraphKind::CycleUndirected, N, 0, 1.0, 0}, {Layout::Tag::SemicircleSplit, 0, 0}},
        {"star-center-a", {GraphKind::Star, N, 0, 1.0, 0}, {Layout::Tag::CenterA, half, 0}},
        {"star-center-b", {GraphKind::Star, N, 0, 1.0, 0}, {Layout::Tag::CenterB, half, 0}},
    };
}

std::vector<GraphCompareRow> run_graph_compare(const GraphCompareSpec& spec, unsigned threads)
{
    if (spec.N < kMinPopulation)
        throw DomainError(fmt::format("graph comparison needs N >= {}", kMinPopulation));
    const auto grid = RGrid::make(spec.inference.grid);
    const auto graphs = spec.graphs.empty() ? GraphCompareSpec::default_graphs(spec.N) : spec.graphs;
    const std::array kinds{estimate_kind_of(spec.estimator)};

    std::vector<GraphCompareRow> rows;
    for (std::size_t ri = 0; ri < spec.r_values.size(); ++ri) {
        const double r = spec.r_values[ri];
        const auto seed = derive_seed(spec.base_seed, ri);
        for (const auto& entry : graphs) {
            GraphCompareRow row;
            row.label = entry.label;
            row.kind = entry.graph.kind;
            row.layout = entry.layout;
            row.r = r;
            try {
                GraphSpec g = entry.graph;
                g.n_vertices = spec.N;
                const PreparedModel prepared(GraphModel{g, spec.rule}, entry.layout);
                std::vector<TrajectoryEstimates> runs(spec.trajectories);
                const BatchConfig batch{seed, 0, spec.trajectories, resolved_max_steps(spec.max_steps, spec.N),
                                        threads};
                run_batch_streamed(prepared, r, batch, [&](std::size_t i, EventLog&& log) {
                    runs[i] = estimate_trajectory(log, spec.inference, grid, kinds, 0);
                });
                std::vector<TrajectoryOutline> outlines;
                for (const auto& run : runs)
                    outlines.push_back(run.outline);
                row.trajectories = trajectory_stats(outlines);
                row.estimate = estimator_stats(kinds[0], runs, r);
            } catch (const std::exception& e) {
                row.error = e.what();
                row.estimate.mean = row.estimate.stddev = row.estimate.bias = row.estimate.mse = kNaN;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

namespace {

Json graph_entry_to_json(const GraphEntry& e)
{
    Json j;
    j["label"] = e.label;
    j["graph"] = std::string(to_string(e.graph.kind));
    if (e.graph.kind == GraphKind::KRegular)
        j["k"] = e.graph.k;
    if (e.graph.kind == GraphKind::ErdosRenyiStatic || e.graph.kind == GraphKind::ErdosRenyiPerStep)
        j["p"] = e.graph.p;
    if (e.graph.kind == GraphKind::ErdosRenyiStatic)
        j["graph_seed"] = e.graph.graph_seed;
    j["layout"] = init_to_json(e.layout);
    return j;
}

GraphEntry graph_entry_from_json(const Json& j, std::int64_t N)
{
    check_keys(j, {"label", "graph", "k", "p", "graph_seed", "layout"}, "graph entry");
    GraphEntry e;
    e.graph.kind = parse_graph_kind(j.at("graph").get<std::string>());
    e.label = get_or<std::string>(j, "label", std::string(to_string(e.graph.kind)));
    e.graph.n_vertices = N;
    e.graph.k = get_or<std::int64_t>(j, "k", 0);
    e.graph.p = get_or<double>(j, "p", 1.0);
    e.graph.graph_seed = get_or<std::uint64_t>(j, "graph_seed", 0);
    if (j.contains("layout")) {
        const auto init = init_from_json(j.at("layout"));
        if (!std::holds_alternative<Layout>(init))
            throw ParseError("graph entry layout must be a layout object");
        e.layout = std::get<Layout>(init);
    } else if (e.graph.kind == GraphKind::Star) {
        e.layout = {Layout::Tag::CenterA, N / 2, 0};
    } else if (e.graph.kind == GraphKind::CycleUndirected || e.graph.kind == GraphKind::CycleDirected ||
               e.graph.kind == GraphKind::KRegular) {
        e.layout = {Layout::Tag::SemicircleSplit, 0, 0};
    } else {
        e.layout = {Layout::Tag::CountsAtRandom, N / 2, 0};
    }
    return e;
}

} // namespace

Json graph_compare_spec_to_json(const GraphCompareSpec& s)
{
    Json j;
    j["N"] = s.N;
    j["r_values"] = s.r_values;
    Json graphs = Json::array();
    for (const auto& g : s.graphs.empty() ? GraphCompareSpec::default_graphs(s.N) : s.graphs)
        graphs.push_back(graph_entry_to_json(g));
    j["graphs"] = std::move(graphs);
    j["rule"] = std::string(to_string(s.rule));
    j["trajectories"] = s.trajectories;
    j["inference"] = inference_config_to_json(s.inference);
    j["estimator"] = std::string(to_string(s.estimator));
    j["seed"] = s.base_seed;
    j["max_steps"] = s.max_steps;
    return j;
}

GraphCompareSpec graph_compare_spec_from_json(const Json& j)
{
    return guarded("graph-compare", [&] {
        check_keys(j,
                   {"N", "r_values", "graphs", "rule", "trajectories", "inference", "estimator", "seed", "max_steps"},
                   "graph-compare");
        GraphCompareSpec s;
        s.N = get_or<std::int64_t>(j, "N", s.N);
        if (j.contains("r_values"))
            s.r_values = j.at("r_values").get<std::vector<double>>();
        if (j.contains("graphs")) {
            const auto& g = j.at("graphs");
            for (const auto& entry : g) {
                if (entry.is_string())
                    s.graphs.push_back(graph_entry_from_json(Json{{"graph", entry}}, s.N));
                else
                    s.graphs.push_back(graph_entry_from_json(entry, s.N));
            }
        }
        if (j.contains("rule"))
            s.rule = parse_update_rule(j.at("rule").get<std::string>());
        s.trajectories = get_or<std::size_t>(j, "trajectories", s.trajectories);
        if (j.contains("inference"))
            s.inference = inference_config_from_json(j.at("inference"));
        if (j.contains("estimator"))
            s.estimator = parse_estimator(j.at("estimator").get<std::string>());
        s.base_seed = get_or<std::uint64_t>(j, "seed", s.base_seed);
        s.max_steps = get_or<std::uint64_t>(j, "max_steps", s.max_steps);
        if (s.trajectories == 0 || s.r_values.empty())
            throw DomainError("graph comparison needs trajectories and at least one r");
        return s;
    });
}

Report graph_compare_report(const GraphCompareSpec& spec, std::span<const GraphCompareRow> rows)
{
    Report rep;
    rep.kind = "graph-compare";
    rep.spec = graph_compare_spec_to_json(spec);
    rep.table.columns = {"graph",       "kind",       "layout",              "r",
                         "n",           "mean_length", "std_length",         "mean_length_fixated",
                         "fixated_b_fraction",         "truncated",          "estimate_mean",
                         "estimate_std", "estimate_bias", "estimate_mse",    "failures",
                         "error"};
    for (const auto& row : rows) {
        const auto& t = row.trajectories;
        const auto& e = row.estimate;
        rep.table.add_row({row.label, std::string(to_string(row.kind)), std::string(to_string(row.layout.tag)), row.r,
                           as_i64(e.n), t.mean_length, t.std_length, t.mean_length_fixated, t.fixated_b_fraction,
                           as_i64(t.truncated), e.mean, e.stddev, e.bias, e.mse, as_i64(e.failures), row.error});
    }
    return rep;
}

// ---- random-graph scan ------------------------------------------------------------

std::vector<RandomGraphRow> run_random_graph_scan(const RandomGraphSpec& spec, unsigned threads)
{
    if (spec.kind != GraphKind::ErdosRenyiPerStep && spec.kind != GraphKind::ErdosRenyiStatic)
        throw DomainError("random-graph scan needs an Erdos-Renyi graph kind");
    const auto grid = RGrid::make(spec.inference.grid);
    const std::array kinds{estimate_kind_of(spec.estimator)};
    std::vector<RandomGraphRow> rows;
    for (std::size_t pi = 0; pi < spec.p_values.size(); ++pi) {
        RandomGraphRow row;
        row.p = spec.p_values[pi];
        try {
            if (!(row.p > 0.0 && row.p <= 1.0))
                throw DomainError(fmt::format("edge probability {} outside (0, 1]", row.p));
            const GraphSpec g{spec.kind, spec.N, 0, row.p, spec.graph_seed};
            const PreparedModel prepared(GraphModel{g, spec.rule}, Layout{Layout::Tag::CountsAtRandom, spec.a, 0});
            std::vector<TrajectoryEstimates> runs(spec.trajectories);
            const BatchConfig batch{derive_seed(spec.base_seed, pi), 0, spec.trajectories,
                                    resolved_max_steps(spec.max_steps, spec.N), threads};
            run_batch_streamed(prepared, spec.r, batch, [&](std::size_t i, EventLog&& log) {
                runs[i] = estimate_trajectory(log, spec.inference, grid, kinds, 0);
            });
            std::vector<TrajectoryOutline> outlines;
            for (const auto& run : runs)
                outlines.push_back(run.outline);
            row.trajectories = trajectory_stats(outlines);
            row.estimate = estimator_stats(kinds[0], runs, spec.r);
        } catch (const std::exception& e) {
            row.error = e.what();
            row.estimate.mean = row.estimate.stddev = row.estimate.bias = row.estimate.mse = kNaN;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json random_graph_spec_to_json(const RandomGraphSpec& s)
{
    Json j;
    j["p_values"] = s.p_values;
    j["graph"] = std::string(to_string(s.kind));
    if (s.kind == GraphKind::ErdosRenyiStatic)
        j["graph_seed"] = s.graph_seed;
    j["rule"] = std::string(to_string(s.rule));
    j["N"] = s.N;
    j["a"] = s.a;
    j["r"] = s.r;
    j["trajectories"] = s.trajectories;
    j["inference"] = inference_config_to_json(s.inference);
    j["estimator"] = std::string(to_string(s.estimator));
    j["seed"] = s.base_seed;
    j["max_steps"] = s.max_steps;
    return j;
}

RandomGraphSpec random_graph_spec_from_json(const Json& j)
{
    return guarded("random-graph", [&] {
        check_keys(j,
                   {"p_values", "graph", "graph_seed", "rule", "N", "a", "r", "trajectories", "inference", "estimator",
                    "seed", "max_steps"},
                   "random-graph");
        RandomGraphSpec s;
        if (j.contains("p_values"))
            s.p_values = j.at("p_values").get<std::vector<double>>();
        if (j.contains("graph"))
            s.kind = parse_graph_kind(j.at("graph").get<std::string>());
        s.graph_seed = get_or<std::uint64_t>(j, "graph_seed", s.graph_seed);
        if (j.contains("rule"))
            s.rule = parse_update_rule(j.at("rule").get<std::string>());
        s.N = get_or<std::int64_t>(j, "N", s.N);
        s.a = get_or<std::int64_t>(j, "a", s.a);
        s.r = get_or<double>(j, "r", s.r);
        s.trajectories = get_or<std::size_t>(j, "trajectories", s.trajectories);
        if (j.contains("inference"))
            s.inference = inference_config_from_json(j.at("inference"));
        if (j.contains("estimator"))
            s.estimator = parse_estimator(j.at("estimator").get<std::string>());
        s.base_seed = get_or<std::uint64_t>(j, "seed", s.base_seed);
        s.max_steps = get_or<std::uint64_t>(j, "max_steps", s.max_steps);
        if (s.p_values.empty() || s.trajectories == 0)
            throw DomainError("random-graph scan needs p values and trajectories");
        return s;
    });
}

Report random_graph_report(const RandomGraphSpec& spec, std::span<const RandomGraphRow> rows)
{
    Report rep;
    rep.kind = "random-graph";
    rep.spec = random_graph_spec_to_json(spec);
    rep.table.columns = {"p",        "n",           "mean_length",  "std_length",    "mean_length_fixated",
                         "truncated", "estimate_mean", "estimate_std", "estimate_bias", "estimate_mse",
                         "failures", "error"};
    for (const auto& row : rows) {
        const auto& t = row.trajectories;
        const auto& e = row.estimate;
        rep.table.add_row({row.p, as_i64(e.n), t.mean_length, t.std_length, t.mean_length_fixated,
                           as_i64(t.truncated), e.mean, e.stddev, e.bias, e.mse, as_i64(e.failures), row.error});
    }
    return rep;
}

// ---- information gain -------------------------------------------------------------

std::size_t head_length(std::size_t n, double fraction)
{
    if (n < 2)
        return n;
    const auto h = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-12));
    return std::clamp<std::size_t>(h, 1, n - 1);
}

InfoGainResult run_info_gain(const InfoGainSpec& spec)
{
    if (!(spec.head_fraction > 0.0 && spec.head_fraction < 1.0))
        throw DomainError("head fraction must lie in (0, 1)");
    const PreparedModel prepared(spec.model, spec.init);
    const auto log =
        run_trajectory(prepared, spec.r, spec.seed, resolved_max_steps(spec.max_steps, prepared.initial_size()));
    InfoGainResult res;
    res.outcome = log.outcome;
    res.steps = log.steps;
    res.trace = info_gain_trace(log, spec.config);
    const auto n = res.trace.size();
    res.head = head_length(n, spec.head_fraction);
    auto mean_kl = [&](std::size_t lo, std::size_t hi) {
        if (hi <= lo)
            return kNaN;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            s += res.trace[i].kl;
        return s / static_cast<double>(hi - lo);
    };
    res.head_mean = mean_kl(0, res.head);
    res.tail_mean = mean_kl(res.head, n);
    return res;
}

Json info_gain_spec_to_json(const InfoGainSpec& s)
{
    Json j;
    j["model"] = model_to_json(s.model);
    j["init"] = init_to_json(s.init);
    j["r"] = s.r;
    j["seed"] = s.seed;
    j["max_steps"] = s.max_steps;
    j["prior"] = prior_to_json(s.config.prior);
    j["grid"] = grid_to_json(s.config.grid);
    j["estimator"] = std::string(to_string(s.config.estimator));
    j["head_fraction"] = s.head_fraction;
    return j;
}

InfoGainSpec info_gain_spec_from_json(const Json& j)
{
    return guarded("info-gain", [&] {
        check_keys(j, {"model", "init", "r", "seed", "max_steps", "prior", "grid", "estimator", "head_fraction"},
                   "info-gain");
        InfoGainSpec s;
        s.model = model_or_default(j, "model");
        if (j.contains("init"))
            s.init = init_from_json(j.at("init"));
        s.r = get_or<double>(j, "r", s.r);
        s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
        s.max_steps = get_or<std::uint64_t>(j, "max_steps", s.max_steps);
        if (j.contains("prior")) {
            const auto& p = j.at("prior");
            s.config.prior = p.is_string() ? parse_prior(p.get<std::string>()) : prior_from_json(p);
        }
        s.config.prior.validate();
        if (j.contains("grid"))
            s.config.grid = grid_from_json(j.at("grid"));
        if (j.contains("estimator"))
            s.config.estimator = parse_estimator(j.at("estimator").get<std::string>());
        s.head_fraction = get_or<double>(j, "head_fraction", s.head_fraction);
        return s;
    });
}

Report info_gain_report(const InfoGainSpec& spec, const InfoGainResult& res)
{
    Report rep;
    rep.kind = "info-gain";
    rep.spec = info_gain_spec_to_json(spec);
    rep.summary["n_events"] = res.trace.size();
    rep.summary["outcome"] = std::string(to_string(res.outcome));
    rep.summary["steps"] = res.steps;
    rep.summary["head_records"] = res.head;
    rep.summary["head_mean_kl"] = std::isnan(res.head_mean) ? Json(nullptr) : Json(res.head_mean);
    rep.summary["tail_mean_kl"] = std::isnan(res.tail_mean) ? Json(nullptr) : Json(res.tail_mean);
    rep.table.columns = {"step", "a", "b", "r_hat", "p_true", "p_hat", "kl"};
    for (const auto& rec : res.trace)
        rep.table.add_row({as_i64(rec.step, 0), rec.state.a, rec.state.b, rec.r_hat, rec.p_true, rec.p_hat, rec.kl});
    return rep;
}

// ---- fixation check ---------------------------------------------------------------

bool fixation_oracle_applies(const Model& model)
{
    if (const auto* wm = std::get_if<WellMixedModel>(&model)) {
        const auto tag = wm->process.tag;
        return !wm->game && (tag == ProcessKind::Tag::Moran || tag == ProcessKind::Tag::SeparatedBirthDeath);
    }
    const auto& gm = std::get<GraphModel>(model);
    if (gm.rule != UpdateRule::BirthDeath)
        return false;
    switch (gm.graph.kind) {
    case GraphKind::Complete:
    case GraphKind::CycleDirected:
    case GraphKind::CycleUndirected:
    case GraphKind::KRegular:
    case GraphKind::ErdosRenyiPerStep: return true;
    default: return false;
    }
}

FixationCheckResult run_fixation_check(const FixationCheckSpec& spec, unsigned threads)
{
    if (spec.b <= 0 || spec.b >= spec.N)
        throw DomainError(fmt::format("initial B count {} is not interior for N = {}", spec.b, spec.N));
    const Model model = with_size(spec.model, spec.N);
    const bool graph = std::holds_alternative<GraphModel>(model);
    const InitialCondition init = graph ? InitialCondition{Layout{Layout::Tag::CountsAtRandom, spec.N - spec.b, 0}}
                                        : InitialCondition{PopulationState{spec.N - spec.b, spec.b}};
    const PreparedModel prepared(model, init);

    std::vector<TrajectoryOutline> outlines(spec.trajectories);
    const BatchConfig batch{spec.base_seed, 0, spec.trajectories, resolved_max_steps(spec.max_steps, spec.N), threads};
    run_batch_streamed(prepared, spec.r, batch,
                       [&](std::size_t i, EventLog&& log) { outlines[i] = {log.steps, log.outcome}; });

    FixationCheckResult res;
    res.n = outlines.size();
    for (const auto& o : outlines) {
        res.fixated_b += o.outcome == Outcome::FixatedB;
        res.truncated += o.outcome == Outcome::Truncated;
    }
    res.fraction = static_cast<double>(res.fixated_b) / static_cast<double>(res.n);
    res.mean_length = trajectory_stats(outlines).mean_length;
    if (fixation_oracle_applies(model)) {
        const double phi = fixation_probability(spec.r, spec.N, spec.b);
        res.oracle = phi;
        res.sigma = std::sqrt(phi * (1.0 - phi) / static_cast<double>(res.n));
        res.z = res.sigma > 0.0 ? (res.fraction - phi) / res.sigma : (res.fraction == phi ? 0.0 : kNaN);
    } else {
        res.sigma = res.z = kNaN;
    }
    return res;
}

Json fixation_check_spec_to_json(const FixationCheckSpec& s)
{
    Json j;
    j["model"] = model_to_json(s.model);
    j["N"] = s.N;
    j["b"] = s.b;
    j["r"] = s.r;
    j["trajectories"] = s.trajectories;
    j["seed"] = s.base_seed;
    j["max_steps"] = s.max_steps;
    return j;
}

FixationCheckSpec fixation_check_spec_from_json(const Json& j)
{
    return guarded("fixation-check", [&] {
        check_keys(j, {"model", "N", "b", "r", "trajectories", "seed", "max_steps"}, "fixation-check");
        FixationCheckSpec s;
        if (j.contains("model"))
            s.model = model_from_json(j.at("model"));
        s.N = get_or<std::int64_t>(j, "N", s.N);
        s.b = get_or<std::int64_t>(j, "b", s.b);
        s.r = get_or<double>(j, "r", s.r);
        s.trajectories = get_or<std::size_t>(j, "trajectories", s.trajectories);
        s.base_seed = get_or<std::uint64_t>(j, "seed", s.base_seed);
        s.max_steps = get_or<std::uint64_t>(j, "max_steps", s.max_steps);
        if (s.trajectories == 0)
            throw DomainError("fixation check needs at least one trajectory");
        return s;
    });
}

Report fixation_check_report(const FixationCheckSpec& spec, const FixationCheckResult& res)
{
    Report rep;
    rep.kind = "fixation-check";
    rep.spec = fixation_check_spec_to_json(spec);
    rep.table.columns = {"N", "b", "r", "n", "fixated_b", "fraction", "oracle", "sigma", "z", "truncated",
                         "mean_length"};
    rep.table.add_row({spec.N, spec.b, spec.r, as_i64(res.n), as_i64(res.fixated_b), res.fraction,
                       res.oracle.value_or(kNaN), res.sigma, res.z, as_i64(res.truncated), res.mean_length});
    return rep;
}

// ---- simulate ---------------------------------------------------------------------

Json simulate_spec_to_json(const SimulateSpec& s)
{
    Json j;
    j["model"] = model_to_json(s.model);
    j["init"] = init_to_json(s.init);
    j["r"] = s.r;
    j["seed"] = s.seed;
    j["max_steps"] = s.max_steps;
    return j;
}

SimulateSpec simulate_spec_from_json(const Json& j)
{
    return guarded("simulate", [&] {
        check_keys(j, {"model", "init", "r", "seed", "max_steps"}, "simulate");
        SimulateSpec s;
        s.model = model_or_default(j, "model");
        if (j.contains("init"))
            s.init = init_from_json(j.at("init"));
        s.r = get_or<double>(j, "r", s.r);
        s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
        s.max_steps = get_or<std::uint64_t>(j, "max_steps", s.max_steps);
        return s;
    });
}

EventLog run_simulate(const SimulateSpec& spec)
{
    const PreparedModel prepared(spec.model, spec.init);
    return run_trajectory(prepared, spec.r, spec.seed, resolved_max_steps(spec.max_steps, prepared.initial_size()));
}

std::string run_experiment(const std::string& kind, const Json& request, OutputFormat format, unsigned threads)
{
    if (kind == "sweep") {
        const auto spec = sweep_spec_from_json(request);
        const auto cells = run_sweep(spec, threads);
        return render(sweep_report(spec, cells), format);
    }
    if (kind == "histogram") {
        const auto spec = histogram_spec_from_json(request);
        return render(histogram_report(spec, run_histogram(spec, threads)), format);
    }
    if (kind == "graph-compare") {
        const auto spec = graph_compare_spec_from_json(request);
        const auto rows = run_graph_compare(spec, threads);
        return render(graph_compare_report(spec, rows), format);
    }
    if (kind == "random-graph") {
        const auto spec = random_graph_spec_from_json(request);
        const auto rows = run_random_graph_scan(spec, threads);
        return render(random_graph_report(spec, rows), format);
    }
    if (kind == "info-gain") {
        const auto spec = info_gain_spec_from_json(request);
        return render(info_gain_report(spec, run_info_gain(spec)), format);
    }
    if (kind == "fixation-check") {
        const auto spec = fixation_check_spec_from_json(request);
        return render(fixation_check_report(spec, run_fixation_check(spec, threads)), format);
    }
    throw ParseError(fmt::format("unknown experiment '{}'", kind));
}

} // namespace moran
