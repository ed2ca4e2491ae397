#pragma once

#include "harness/output.hpp"
#include "inference/estimators.hpp"
#include "inference/posterior.hpp"
#include "infogain/infogain.hpp"
#include "sim/batch.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace moran {

// ---- single-log inference ---------------------------------------------------------

struct InferenceConfig {
    PriorSpec prior = PriorSpec::gamma();
    GridConfig grid;
    double ci_mass = 0.95;
    double pseudocount = 0.0;
    bool compute_map = true;
    bool diagnostics = true; // Gaussian-fit residual
};

struct InferenceResult {
    std::size_t n_events = 0; // informative events
    FpsParameterSet params;
    std::optional<PosteriorGrid> posterior;
    PosteriorSummary summary;
    std::optional<double> map;
    std::string map_error;
    RatioEstimate counting;
    RatioEstimate inverse_counting;
    double gaussian_residual = 0.0;
};

/// The one inference path shared by `infer` and every experiment. Throws NumericalError
/// when the posterior cannot be normalized; a MAP failure is recorded, not thrown.
InferenceResult infer_events(std::span<const SelectionEvent> events, const InferenceConfig& config,
                             const std::shared_ptr<const RGrid>& grid);

/// With sample_size > 0 the events are first reduced by sample_events(log, sample_size, sample_seed).
InferenceResult infer_log(const EventLog& log, const InferenceConfig& config, const std::shared_ptr<const RGrid>& grid,
                          std::size_t sample_size = 0, std::uint64_t sample_seed = 0);

/// Summary record {mean, median, mode, map, ci_lo, ci_hi, counting, inverse_counting, ...}.
Json inference_to_json(const InferenceResult& result);

/// Two-column (r, density) CSV with the schema header.
std::string posterior_csv(const PosteriorGrid& posterior);

Json inference_config_to_json(const InferenceConfig& config);
InferenceConfig inference_config_from_json(const Json& j);

struct InferRequest {
    InferenceConfig inference;
    std::size_t sample_size = 0; // 0 uses every event
    std::uint64_t sample_seed = 0;
};

Json infer_request_to_json(const InferRequest& request);
InferRequest infer_request_from_json(const Json& j);
Report infer_report(const EventLog& log, const InferRequest& request, const InferenceResult& result);

// ---- estimators reported by the sweeps --------------------------------------------

enum class EstimateKind { Counting, InverseCounting, Mean, Median, Mode, Map };
inline constexpr std::size_t kEstimateKinds = 6;

std::string_view to_string(EstimateKind kind);
EstimateKind parse_estimate_kind(const std::string& name);

/// Per-trajectory estimates; NaN marks a failure (sentinel or numerical).
struct TrajectoryEstimates {
    TrajectoryOutline outline;
    std::array<double, kEstimateKinds> value{};
};

/// Seed used to subsample trajectory `seed`'s log when a sample size is set.
std::uint64_t sample_seed_for(std::uint64_t trajectory_seed);

TrajectoryEstimates estimate_trajectory(const EventLog& log, const InferenceConfig& config,
                                        const std::shared_ptr<const RGrid>& grid, std::span<const EstimateKind> kinds,
                                        std::size_t sample_size);

struct EstimatorStats {
    EstimateKind kind = EstimateKind::Mean;
    std::size_t n = 0;
    std::size_t n_success = 0;
    std::size_t failures = 0;
    double mean = 0.0;
    double stddev = 0.0; // n_success - 1 denominator; 0 with a single success
    double bias = 0.0;
    double mse = 0.0;
};

EstimatorStats estimator_stats(EstimateKind kind, std::span<const TrajectoryEstimates> runs, double r_true);

// ---- initial conditions -----------------------------------------------------------

struct InitRule {
    enum class Tag { SingleMutant, Balanced, Explicit, GraphLayout };
    Tag tag = Tag::Balanced;
    std::int64_t a = 0; // Explicit
    Layout layout;      // GraphLayout

    /// Initial condition for population size N at relative fitness r.
    InitialCondition resolve(std::int64_t N, double r, bool graph) const;
};

/// a = max(1, round(N r / (r + 1))), capped at N - 1.
std::int64_t balanced_a(std::int64_t N, double r);

std::string_view to_string(InitRule::Tag tag);

/// Model with its population size set to N (graph vertex count; carrying capacity is untouched).
Model with_size(Model model, std::int64_t N);

// ---- sweep ------------------------------------------------------------------------

struct SweepSpec {
    Model model = WellMixedModel{};
    std::vector<std::int64_t> n_values;
    std::vector<double> r_values;
    InitRule init;
    std::size_t trajectories = 200;
    std::size_t sample_size = 0;
    InferenceConfig inference;
    std::vector<EstimateKind> estimators;
    std::uint64_t base_seed = 0;
    std::uint64_t max_steps = 0;

    /// Desk-scale defaults: N in 3..30 step 3, r in 0.1..2.0 step 0.1, 200 trajectories.
    static SweepSpec defaults();
};

struct CellSummary {
    std::int64_t N = 0;
    double r_true = 0.0;
    PopulationState start;
    std::uint64_t cell_seed = 0;
    std::vector<EstimatorStats> estimators;
    TrajectoryStats trajectories;
    std::string error; // cell-level failure, empty on success
};

/// Seed of cell `index` (cells numbered N-major); trajectory i of the cell uses
/// derive_seed(cell_seed, i).
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t index);

CellSummary run_cell(const SweepSpec& spec, std::int64_t N, double r, std::uint64_t seed, unsigned threads,
                     const std::shared_ptr<const RGrid>& grid);
std::vector<CellSummary> run_sweep(const SweepSpec& spec, unsigned threads);

Json sweep_spec_to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const Json& j);
Report sweep_report(const SweepSpec& spec, std::span<const CellSummary> cells);

// ---- histogram --------------------------------------------------------------------

struct HistogramSpec {
    Model model = WellMixedModel{};
    InitialCondition init = PopulationState{24, 16};
    double r = 1.5;
    std::size_t trajectories = 1000;
    std::size_t sample_size = 0;
    InferenceConfig inference;
    Estimator estimator = Estimator::Mean;
    double bin_width = 0.1;
    std::uint64_t base_seed = 0;
    std::uint64_t max_steps = 0;
};

struct HistogramResult {
    std::vector<double> estimates; // NaN for failed trajectories
    std::vector<std::size_t> counts;
    double bin_width = 0.0;
    std::size_t failures = 0;
    double fraction_below_one = 0.0; // among successes
    double mean = 0.0;
    double stddev = 0.0;
    TrajectoryStats trajectories;
};

HistogramResult run_histogram(const HistogramSpec& spec, unsigned threads);
Json histogram_spec_to_json(const HistogramSpec& spec);
HistogramSpec histogram_spec_from_json(const Json& j);
Report histogram_report(const HistogramSpec& spec, const HistogramResult& result);

// ---- graph comparison -------------------------------------------------------------

struct GraphEntry {
    std::string label;
    GraphSpec graph; // n_vertices is set from the comparison's N
    Layout layout;
};

struct GraphCompareSpec {
    std::int64_t N = 20;
    std::vector<double> r_values{1.2, 1.5, 2.0};
    std::vector<GraphEntry> graphs; // empty selects complete, cycle, star (both centers)
    UpdateRule rule = UpdateRule::BirthDeath;
    std::size_t trajectories = 200;
    InferenceConfig inference;
    Estimator estimator = Estimator::Mean;
    std::uint64_t base_seed = 0;
    std::uint64_t max_steps = 0;

    static std::vector<GraphEntry> default_graphs(std::int64_t N);
};

struct GraphCompareRow {
    std::string label;
    GraphKind kind = GraphKind::Complete;
    Layout layout;
    double r = 0.0;
    TrajectoryStats trajectories;
    EstimatorStats estimate;
    std::string error;
};

/// Every graph at a given r shares the same trajectory seeds.
std::vector<GraphCompareRow> run_graph_compare(const GraphCompareSpec& spec, unsigned threads);
Json graph_compare_spec_to_json(const GraphCompareSpec& spec);
GraphCompareSpec graph_compare_spec_from_json(const Json& j);
Report graph_compare_report(const GraphCompareSpec& spec, std::span<const GraphCompareRow> rows);

// ---- random-graph scan ------------------------------------------------------------

struct RandomGraphSpec {
    std::vector<double> p_values{0.2, 0.4, 0.6, 0.8, 1.0};
    GraphKind kind = GraphKind::ErdosRenyiPerStep;
    std::uint64_t graph_seed = 0;
    UpdateRule rule = UpdateRule::BirthDeath;
    std::int64_t N = 12;
    std::int64_t a = 5;
    double r = 1.2;
    std::size_t trajectories = 1000;
    InferenceConfig inference;
    Estimator estimator = Estimator::Mean;
    std::uint64_t base_seed = 0;
    std::uint64_t max_steps = 0;
};

struct RandomGraphRow {
    double p = 0.0;
    TrajectoryStats trajectories;
    EstimatorStats estimate;
    std::string error;
};

std::vector<RandomGraphRow> run_random_graph_scan(const RandomGraphSpec& spec, unsigned threads);
Json random_graph_spec_to_json(const RandomGraphSpec& spec);
RandomGraphSpec random_graph_spec_from_json(const Json& j);
Report random_graph_report(const RandomGraphSpec& spec, std::span<const RandomGraphRow> rows);

// ---- information gain -------------------------------------------------------------

struct InfoGainSpec {
    Model model = WellMixedModel{};
    InitialCondition init = PopulationState{33, 17};
    double r = 2.0;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 0;
    InfoGainConfig config;
    double head_fraction = 0.2;
};

struct InfoGainResult {
    std::vector<InfoGainRecord> trace;
    Outcome outcome = Outcome::Truncated;
    std::uint64_t steps = 0;
    std::size_t head = 0;   // records in the leading segment
    double head_mean = 0.0; // mean KL over the leading head_fraction of records
    double tail_mean = 0.0; // mean KL over the rest
};

/// Leading-segment length: ceil(fraction * n), at least 1 and at most n - 1 when n >= 2.
std::size_t head_length(std::size_t n, double fraction);

InfoGainResult run_info_gain(const InfoGainSpec& spec);
Json info_gain_spec_to_json(const InfoGainSpec& spec);
InfoGainSpec info_gain_spec_from_json(const Json& j);
Report info_gain_report(const InfoGainSpec& spec, const InfoGainResult& result);

// ---- fixation check ---------------------------------------------------------------

struct FixationCheckSpec {
    Model model = WellMixedModel{ProcessKind{ProcessKind::Tag::SeparatedBirthDeath}, std::nullopt};
    std::int64_t N = 10;
    std::int64_t b = 1;
    double r = 2.0;
    std::size_t trajectories = 10000;
    std::uint64_t base_seed = 0;
    std::uint64_t max_steps = 0;
};

struct FixationCheckResult {
    std::size_t n = 0;
    std::size_t fixated_b = 0;
    std::size_t truncated = 0;
    double fraction = 0.0;
    std::optional<double> oracle; // closed form, when it applies to the model
    double sigma = 0.0;           // binomial standard error at the oracle value
    double z = 0.0;
    double mean_length = 0.0;
};

/// The closed-form fixation probability applies to constant-fitness Moran and separated
/// birth-death chains, and to birth-death updating on regular graphs (isothermal).
bool fixation_oracle_applies(const Model& model);

FixationCheckResult run_fixation_check(const FixationCheckSpec& spec, unsigned threads);
Json fixation_check_spec_to_json(const FixationCheckSpec& spec);
FixationCheckSpec fixation_check_spec_from_json(const Json& j);
Report fixation_check_report(const FixationCheckSpec& spec, const FixationCheckResult& result);

// ---- simulate request -------------------------------------------------------------

struct SimulateSpec {
    Model model = WellMixedModel{};
    InitialCondition init = PopulationState{5, 5};
    double r = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 0;
};

Json simulate_spec_to_json(const SimulateSpec& spec);
SimulateSpec simulate_spec_from_json(const Json& j);
EventLog run_simulate(const SimulateSpec& spec);

/// Dispatches a request by experiment name and renders the report.
std::string run_experiment(const std::string& kind, const Json& request, OutputFormat format, unsigned threads);

} // namespace moran
