#include "core/errors.hpp"
#include "core/process.hpp"
#include "io/eventlog_io.hpp"
#include "sim/batch.hpp"
#include "sim/simulate.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace moran;

namespace {

WellMixedModel well_mixed(ProcessKind::Tag tag)
{
    return {ProcessKind{tag}, std::nullopt};
}

std::vector<std::pair<Model, InitialCondition>> sample_models()
{
    ProcessKind vs{ProcessKind::Tag::VariableSize, 8, default_sigmoid_steepness(8)};
    ProcessKind enlarged{ProcessKind::Tag::SeparatedBirthDeath};
    enlarged.death_pool = DeathPool::Enlarged;
    return {
        {well_mixed(ProcessKind::Tag::Moran), PopulationState{6, 4}},
        {well_mixed(ProcessKind::Tag::SeparatedBirthDeath), PopulationState{5, 5}},
        {WellMixedModel{enlarged, std::nullopt}, PopulationState{5, 5}},
        {well_mixed(ProcessKind::Tag::SeparatedDeathBirth), PopulationState{4, 6}},
        {WellMixedModel{vs, std::nullopt}, PopulationState{4, 4}},
        {WellMixedModel{ProcessKind{}, GameMatrix{1.0, 2.0, 1.5, 0.5}}, PopulationState{5, 5}},
        {GraphModel{{GraphKind::Star, 9, 0, 1.0, 0}, UpdateRule::DeathBirth}, Layout{Layout::Tag::CenterA, 0, 0}},
        {GraphModel{{GraphKind::CycleUndirected, 8, 0, 1.0, 0}, UpdateRule::BirthDeath},
         Layout{Layout::Tag::SemicircleSplit}},
        {GraphModel{{GraphKind::ErdosRenyiPerStep, 8, 0, 0.3, 0}, UpdateRule::BirthDeath},
         Layout{Layout::Tag::CountsAtRandom, 3, 1}},
        {GraphModel{{GraphKind::ErdosRenyiStatic, 8, 0, 0.4, 5}, UpdateRule::BirthDeath},
         Layout{Layout::Tag::RandomBalanced, 0, 2}},
    };
}

} // namespace

TEST_CASE("replay consistency and outcome")
{
    for (const auto& [model, init] : sample_models())
        for (double r : {0.0, 0.6, 1.0, 2.0})
            for (std::uint64_t seed = 0; seed < 8; ++seed) {
                const auto log = run_trajectory(model, init, r, seed, 20000);
                CHECK_NOTHROW(check_replay(log));
                auto state = log.initial_state;
                for (const auto& e : log.events) {
                    CHECK(e.pre_state == state);
                    CHECK(std::abs(e.post_state.a - e.pre_state.a) <= 1);
                    CHECK(std::abs(e.post_state.b - e.pre_state.b) <= 1);
                    CHECK(e.pool.count(e.winner) >= 1);
                    if (e.kind == EventKind::MoranComposite && e.stayed)
                        CHECK(e.pre_state == e.post_state);
                    state = e.post_state;
                }
                if (log.outcome == Outcome::FixatedA)
                    CHECK(log.final_state().b == 0);
                if (log.outcome == Outcome::FixatedB)
                    CHECK(log.final_state().a == 0);
            }
}

TEST_CASE("replay detects tampering")
{
    auto log = run_trajectory(well_mixed(ProcessKind::Tag::SeparatedBirthDeath), PopulationState{3, 3}, 1.0, 4, 1000);
    REQUIRE(log.events.size() > 3);
    auto bad = log;
    bad.events[2].post_state.a += 1;
    CHECK_THROWS_AS(check_replay(bad), DomainError);
    bad = log;
    bad.outcome = log.outcome == Outcome::FixatedA ? Outcome::FixatedB : Outcome::FixatedA;
    CHECK_THROWS_AS(check_replay(bad), DomainError);
}

TEST_CASE("zero fitness B never fixates")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto log =
            run_trajectory(well_mixed(ProcessKind::Tag::SeparatedBirthDeath), PopulationState{5, 3}, 0.0, seed, 100000);
        CHECK(log.outcome == Outcome::FixatedA);
        for (const auto& e : log.events)
            if (e.kind == EventKind::Birth)
                CHECK(e.winner == Type::A);
    }
    std::vector<TrajectoryOutline> outlines;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto log =
            run_trajectory(well_mixed(ProcessKind::Tag::SeparatedBirthDeath), PopulationState{9, 1}, 0.0, seed, 100000);
        outlines.push_back({log.steps, log.outcome});
    }
    const auto st = trajectory_stats(outlines);
    CHECK(st.fixated_a_fraction == 1.0);
    CHECK(st.mean_length < 20.0);
}

TEST_CASE("seed determinism is byte-exact")
{
    for (const auto& [model, init] : sample_models()) {
        const auto x = event_log_to_string(run_trajectory(model, init, 1.3, 77, 5000));
        const auto y = event_log_to_string(run_trajectory(model, init, 1.3, 77, 5000));
        const auto z = event_log_to_string(run_trajectory(model, init, 1.3, 78, 5000));
        CHECK(x == y);
        CHECK(x != z);
    }
}

TEST_CASE("step cap truncates")
{
    const auto log = run_trajectory(well_mixed(ProcessKind::Tag::Moran), PopulationState{50, 50}, 1.0, 1, 10);
    CHECK(log.steps == 10);
    CHECK(log.outcome == Outcome::Truncated);
    CHECK_NOTHROW(check_replay(log));
    CHECK_THROWS_AS(run_trajectory(well_mixed(ProcessKind::Tag::Moran), PopulationState{5, 5}, 1.0, 1, 0), DomainError);
    CHECK_THROWS_AS(run_trajectory(well_mixed(ProcessKind::Tag::Moran), PopulationState{1, 1}, 1.0, 1, 10), DomainError);
    CHECK_THROWS_AS(run_trajectory(well_mixed(ProcessKind::Tag::Moran), PopulationState{0, 5}, 1.0, 1, 10), DomainError);
    CHECK(default_max_steps(10) == 5000);
}

TEST_CASE("event layout per process")
{
    SUBCASE("separated birth-death alternates birth and death")
    {
        const auto log =
            run_trajectory(well_mixed(ProcessKind::Tag::SeparatedBirthDeath), PopulationState{4, 4}, 1.2, 3, 1000);
        REQUIRE(log.events.size() == 2 * log.steps);
        for (std::size_t i = 0; i < log.events.size(); ++i) {
            CHECK(log.events[i].kind == (i % 2 == 0 ? EventKind::Birth : EventKind::Death));
            if (i % 2 == 0)
                CHECK(log.events[i].pool.size() == 8);
        }
    }
    SUBCASE("separated death-birth selects from N - 1")
    {
        const auto log =
            run_trajectory(well_mixed(ProcessKind::Tag::SeparatedDeathBirth), PopulationState{4, 4}, 1.2, 3, 1000);
        for (std::size_t i = 0; i < log.events.size(); ++i) {
            CHECK(log.events[i].kind == (i % 2 == 0 ? EventKind::Death : EventKind::Birth));
            if (i % 2 == 1)
                CHECK(log.events[i].pool.size() == 7);
        }
    }
    SUBCASE("variable size stays within [3, 2K]")
    {
        ProcessKind vs{ProcessKind::Tag::VariableSize, 6, 1.2};
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto log = run_trajectory(WellMixedModel{vs, std::nullopt}, PopulationState{3, 3}, 1.0, seed, 3000);
            for (const auto& e : log.events) {
                CHECK(e.post_state.size() >= 2);
                CHECK(e.post_state.size() <= 12);
                if (e.pre_state.size() == 3)
                    CHECK(e.kind == EventKind::Birth);
                if (e.pre_state.size() == 12)
                    CHECK(e.kind == EventKind::Death);
            }
        }
    }
}

TEST_CASE("one-step kernel frequencies for N = 3")
{
    const int draws = 100000;
    for (std::int64_t a : {1, 2})
        for (double r : {0.5, 1.0, 2.0}) {
            const PopulationState s{a, 3 - a};
            const auto t = moran_transition_probs(s, constant_fitness(r));
            const auto birth = birth_probabilities(s, constant_fitness(r));
            int up = 0, down = 0, births_a = 0, sep_up = 0, sep_down = 0;
            for (int i = 0; i < draws; ++i) {
                const auto seed = derive_seed(static_cast<std::uint64_t>(a * 1000) + static_cast<std::uint64_t>(r * 10), i);
                const auto m = run_trajectory(well_mixed(ProcessKind::Tag::Moran), s, r, seed, 1);
                const auto& e = m.events.front();
                up += e.post_state.a > s.a;
                down += e.post_state.a < s.a;
                const auto sep = run_trajectory(well_mixed(ProcessKind::Tag::SeparatedBirthDeath), s, r, seed, 1);
                births_a += sep.events.front().winner == Type::A;
                sep_up += sep.final_state().a > s.a;
                sep_down += sep.final_state().a < s.a;
            }
            auto within = [&](int count, double p) {
                return std::abs(count / double(draws) - p) < 4.0 * std::sqrt(p * (1 - p) / draws);
            };
            CHECK(within(up, t.up));
            CHECK(within(down, t.down));
            CHECK(within(draws - up - down, t.stay));
            CHECK(within(births_a, birth.p_A));
            CHECK(within(sep_up, t.up));
            CHECK(within(sep_down, t.down));
        }
}

TEST_CASE("batches")
{
    PreparedModel model(well_mixed(ProcessKind::Tag::Moran), PopulationState{5, 5});
    BatchConfig one{123, 0, 1, 0, 1};
    const auto single = run_batch(model, 1.4, one);
    REQUIRE(single.size() == 1);
    CHECK(event_log_to_string(single[0]) ==
          event_log_to_string(run_trajectory(model, 1.4, derive_seed(123, 0), default_max_steps(10))));

    BatchConfig full{123, 0, 40, 0, 1};
    const auto serial = run_batch(model, 1.4, full);
    full.threads = 4;
    const auto parallel = run_batch(model, 1.4, full);
    BatchConfig head{123, 0, 15, 0, 3};
    BatchConfig tail{123, 15, 25, 0, 2};
    auto joined = run_batch(model, 1.4, head);
    for (auto& log : run_batch(model, 1.4, tail))
        joined.push_back(std::move(log));
    REQUIRE(joined.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        const auto text = event_log_to_string(serial[i]);
        CHECK(text == event_log_to_string(parallel[i]));
        CHECK(text == event_log_to_string(joined[i]));
    }

    std::vector<std::uint64_t> steps(40);
    run_batch_streamed(model, 1.4, full, [&](std::size_t i, EventLog&& log) { steps[i] = log.steps; });
    for (std::size_t i = 0; i < 40; ++i)
        CHECK(steps[i] == serial[i].steps);
}

TEST_CASE("batch failures carry the lowest index")
{
    try {
        parallel_for(0, 100, 4, [](std::size_t i) {
            if (i % 17 == 5)
                throw NumericalError("boom");
        });
        FAIL("expected a BatchError");
    } catch (const BatchError& e) {
        CHECK(e.index() == 5);
        CHECK_THROWS_AS(std::rethrow_exception(e.cause()), NumericalError);
    }
}

TEST_CASE("sampling events")
{
    const auto log = run_trajectory(well_mixed(ProcessKind::Tag::SeparatedBirthDeath), PopulationState{10, 10}, 1.5, 8,
                                    100000);
    const auto informative =
        static_cast<std::size_t>(std::count_if(log.events.begin(), log.events.end(),
                                               [](const SelectionEvent& e) { return e.informative_kind(); }));
    REQUIRE(informative > 30);

    const auto all = sample_events(log, informative + 5, 1);
    CHECK(all.size() == informative);
    const auto exact = sample_events(log, informative, 1);
    CHECK(exact == all);
    for (const auto& e : all)
        CHECK(e.kind == EventKind::Birth);

    const auto s1 = sample_events(log, 10, 1);
    const auto s2 = sample_events(log, 10, 2);
    CHECK(s1.size() == 10);
    CHECK(s2.size() == 10);
    CHECK(s1 != s2);
    CHECK(sample_events(log, 10, 1) == s1);
    for (std::size_t i = 1; i < s1.size(); ++i)
        CHECK(s1[i - 1].step < s1[i].step);
    CHECK_THROWS_AS(sample_events(log, 0, 1), DomainError);
}

TEST_CASE("trajectory statistics")
{
    std::vector<TrajectoryOutline> same(5, {7, Outcome::FixatedB});
    auto st = trajectory_stats(same);
    CHECK(st.mean_length == 7.0);
    CHECK(st.std_length == 0.0);
    CHECK(st.fixated_b_fraction == 1.0);

    std::vector<TrajectoryOutline> mixed{{2, Outcome::FixatedA}, {4, Outcome::FixatedB}, {9, Outcome::Truncated}};
    st = trajectory_stats(mixed);
    CHECK(st.mean_length == doctest::Approx(5.0));
    CHECK(st.std_length == doctest::Approx(std::sqrt(13.0)));
    CHECK(st.mean_length_fixated == doctest::Approx(3.0));
    CHECK(st.truncated == 1);
    CHECK(st.fixated_a_fraction == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(trajectory_stats(std::span<const TrajectoryOutline>{}), DomainError);
}
