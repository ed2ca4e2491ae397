#include "core/errors.hpp"
#include "core/process.hpp"
#include "harness/experiments.hpp"
#include "io/eventlog_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace moran;

namespace {

InferenceConfig fast_inference()
{
    InferenceConfig c;
    c.grid.points = 1201;
    c.diagnostics = false;
    return c;
}

InitRule init_rule(InitRule::Tag tag, std::int64_t a = 0)
{
    InitRule rule;
    rule.tag = tag;
    rule.a = a;
    return rule;
}

} // namespace

TEST_CASE("initial-condition rules")
{
    CHECK(balanced_a(20, 1.0) == 10);
    CHECK(balanced_a(40, 1.5) == 24);
    CHECK(balanced_a(50, 2.0) == 33);
    CHECK(balanced_a(100, 1.2) == 55);
    CHECK(balanced_a(3, 0.1) == 1);
    CHECK(balanced_a(10, 100.0) == 9);

    const auto single = init_rule(InitRule::Tag::SingleMutant);
    CHECK(std::get<PopulationState>(single.resolve(12, 1.5, false)) == PopulationState{1, 11});
    const auto balanced = init_rule(InitRule::Tag::Balanced);
    CHECK(std::get<PopulationState>(balanced.resolve(30, 1.5, false)) == PopulationState{18, 12});
    const auto explicit_a = init_rule(InitRule::Tag::Explicit, 4);
    CHECK(std::get<PopulationState>(explicit_a.resolve(9, 1.5, false)) == PopulationState{4, 5});
}

TEST_CASE("sweep cells")
{
    SweepSpec spec = SweepSpec::defaults();
    spec.n_values = {6};
    spec.r_values = {1.5};
    spec.trajectories = 1;
    spec.inference = fast_inference();
    spec.base_seed = 4;
    const auto cells = run_sweep(spec, 1);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].error.empty());
    for (const auto& est : cells[0].estimators) {
        CHECK(est.n == 1);
        if (est.n_success == 1)
            CHECK(est.stddev == 0.0);
        else
            CHECK(std::isnan(est.stddev));
    }
    CHECK(cells[0].cell_seed == cell_seed(4, 0));
}

TEST_CASE("sweep counting failures and error cells")
{
    SweepSpec spec = SweepSpec::defaults();
    spec.n_values = {3, 6};
    spec.r_values = {0.2, 1.0};
    spec.init = init_rule(InitRule::Tag::SingleMutant);
    spec.trajectories = 60;
    spec.inference = fast_inference();
    spec.estimators = {EstimateKind::Counting, EstimateKind::Mean};
    const auto cells = run_sweep(spec, 2);
    REQUIRE(cells.size() == 4);
    std::size_t counting_failures = 0;
    for (const auto& c : cells) {
        REQUIRE(c.estimators.size() == 2);
        CHECK(c.estimators[0].n == 60);
        CHECK(c.estimators[0].n_success + c.estimators[0].failures == 60);
        counting_failures += c.estimators[0].failures;
        CHECK(c.estimators[1].failures == 0);
    }
    CHECK(counting_failures > 0);

    SweepSpec broken = spec;
    broken.model = GraphModel{{GraphKind::ErdosRenyiPerStep, 6, 0, 0.5, 0}, UpdateRule::DeathBirth};
    broken.init = {InitRule::Tag::GraphLayout, 0, Layout{Layout::Tag::RandomBalanced, 0, 1}};
    broken.n_values = {6};
    broken.r_values = {1.0};
    const auto bad = run_sweep(broken, 1);
    REQUIRE(bad.size() == 1);
    CHECK_FALSE(bad[0].error.empty());
    const auto csv = render(sweep_report(broken, bad), OutputFormat::Csv);
    CHECK(csv.find("death-birth") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across reruns and thread counts")
{
    const auto request = Json::parse(R"({"n_values":[5,8],"r_values":[0.8,1.6],"trajectories":12,"seed":99,
        "inference":{"grid":{"points":801}}})");
    const auto a = run_experiment("sweep", request, OutputFormat::Csv, 1);
    const auto b = run_experiment("sweep", request, OutputFormat::Csv, 1);
    const auto c = run_experiment("sweep", request, OutputFormat::Csv, 3);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a.find("\"seed\":99") != std::string::npos);
    CHECK(a.rfind(csv_schema_line(), 0) == 0);

    const auto j = Json::parse(run_experiment("sweep", request, OutputFormat::Json, 2));
    CHECK(j["spec"]["seed"] == 99);
    CHECK(j["rows"].size() == 4 * 5);

    const auto h1 = run_experiment("histogram", Json::parse(R"({"trajectories":8,"seed":3})"), OutputFormat::Json, 1);
    const auto h2 = run_experiment("histogram", Json::parse(R"({"trajectories":8,"seed":3})"), OutputFormat::Json, 4);
    CHECK(h1 == h2);

    CHECK_THROWS_AS(run_experiment("nope", Json::object(), OutputFormat::Csv, 1), ParseError);
    CHECK_THROWS_AS(run_experiment("sweep", Json::parse(R"({"trajectorys":3})"), OutputFormat::Csv, 1), ParseError);
}

TEST_CASE("histogram")
{
    HistogramSpec spec;
    spec.trajectories = 1;
    spec.inference = fast_inference();
    auto res = run_histogram(spec, 1);
    CHECK(res.estimates.size() == 1);
    CHECK(std::count_if(res.counts.begin(), res.counts.end(), [](std::size_t c) { return c > 0; }) == 1);

    spec.trajectories = 100;
    spec.r = 0.5;
    spec.init = PopulationState{13, 27};
    res = run_histogram(spec, 2);
    CHECK(res.fraction_below_one > 0.5);
    HistogramSpec zero_width;
    zero_width.bin_width = 0.0;
    CHECK_THROWS_AS(run_histogram(zero_width, 1), DomainError);
}

TEST_CASE("graph comparison")
{
    GraphCompareSpec spec;
    spec.N = 10;
    spec.r_values = {1.0, 2.5};
    spec.trajectories = 40;
    spec.inference = fast_inference();
    spec.rule = UpdateRule::DeathBirth;
    spec.graphs = {{"directed-cycle", {GraphKind::CycleDirected}, {Layout::Tag::SemicircleSplit}}};
    const auto rows = run_graph_compare(spec, 2);
    REQUIRE(rows.size() == 2);
    const double prior_mean = posterior_mean(posterior(PriorSpec::gamma(), {}, RGrid::make(spec.inference.grid)));
    for (const auto& row : rows) {
        CHECK(row.error.empty());
        CHECK(row.estimate.mean == doctest::Approx(prior_mean).epsilon(1e-12));
        CHECK(row.estimate.stddev < 1e-12);
    }

    spec.rule = UpdateRule::BirthDeath;
    spec.r_values = {1.5};
    spec.trajectories = 300;
    spec.graphs = {{"complete", {GraphKind::Complete}, {Layout::Tag::CountsAtRandom, 5, 0}},
                   {"er-p1", {GraphKind::ErdosRenyiPerStep, 0, 0, 1.0}, {Layout::Tag::CountsAtRandom, 5, 0}}};
    const auto same = run_graph_compare(spec, 2);
    REQUIRE(same.size() == 2);
    const auto& x = same[0].trajectories;
    const auto& y = same[1].trajectories;
    CHECK(std::abs(x.mean_length - y.mean_length) < 4.0 * std::sqrt((x.std_length * x.std_length + y.std_length * y.std_length) / 300.0));

    const auto defaults = GraphCompareSpec::default_graphs(20);
    CHECK(defaults.size() == 4);
}

TEST_CASE("random-graph scan")
{
    RandomGraphSpec spec;
    spec.p_values = {0.15, 1.0};
    spec.trajectories = 150;
    spec.inference = fast_inference();
    const auto rows = run_random_graph_scan(spec, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].error.empty());
    CHECK(rows[0].trajectories.mean_length > rows[1].trajectories.mean_length);
}

TEST_CASE("fixation check")
{
    CHECK(fixation_oracle_applies(WellMixedModel{}));
    CHECK(fixation_oracle_applies(WellMixedModel{ProcessKind{ProcessKind::Tag::SeparatedBirthDeath}, std::nullopt}));
    CHECK_FALSE(fixation_oracle_applies(WellMixedModel{ProcessKind{}, GameMatrix{1, 2, 3, 4}}));
    CHECK_FALSE(fixation_oracle_applies(WellMixedModel{ProcessKind{ProcessKind::Tag::VariableSize, 5, 1}, std::nullopt}));
    CHECK(fixation_oracle_applies(GraphModel{{GraphKind::CycleUndirected}, UpdateRule::BirthDeath}));
    CHECK_FALSE(fixation_oracle_applies(GraphModel{{GraphKind::Star}, UpdateRule::BirthDeath}));
    CHECK_FALSE(fixation_oracle_applies(GraphModel{{GraphKind::Complete}, UpdateRule::DeathBirth}));

    FixationCheckSpec spec;
    spec.trajectories = 2000;
    const auto res = run_fixation_check(spec, 2);
    REQUIRE(res.oracle.has_value());
    CHECK(*res.oracle == doctest::Approx(fixation_probability(2.0, 10, 1)));
    CHECK(std::abs(res.z) < 4.0);
}

TEST_CASE("info gain run")
{
    InfoGainSpec spec;
    spec.config.grid.points = 1201;
    const auto res = run_info_gain(spec);
    REQUIRE(res.trace.size() > 10);
    CHECK(res.head == head_length(res.trace.size(), 0.2));
    CHECK(res.head_mean > res.tail_mean);
    CHECK(head_length(10, 0.2) == 2);
    CHECK(head_length(1, 0.2) == 1);
    CHECK(head_length(2, 0.99) == 1);
}

TEST_CASE("single-log inference matches the batch estimates")
{
    SweepSpec spec = SweepSpec::defaults();
    spec.n_values = {12};
    spec.r_values = {1.3};
    spec.trajectories = 6;
    spec.inference = fast_inference();
    spec.estimators = {EstimateKind::Mean, EstimateKind::Median, EstimateKind::Mode, EstimateKind::Counting};
    const auto grid = RGrid::make(spec.inference.grid);
    const PreparedModel prepared(spec.model, spec.init.resolve(12, 1.3, false));
    const auto seed = cell_seed(spec.base_seed, 0);
    for (std::size_t i = 0; i < spec.trajectories; ++i) {
        const auto log = run_trajectory(prepared, 1.3, derive_seed(seed, i), default_max_steps(12));
        const auto est = estimate_trajectory(log, spec.inference, grid, spec.estimators, 0);
        const auto res = infer_log(log, spec.inference, grid);
        CHECK(est.value[static_cast<std::size_t>(EstimateKind::Mean)] == res.summary.mean);
        CHECK(est.value[static_cast<std::size_t>(EstimateKind::Median)] == res.summary.median);
        CHECK(est.value[static_cast<std::size_t>(EstimateKind::Mode)] == res.summary.mode);
    }
}
