#include "sim/simulate.hpp"

#include "core/errors.hpp"
#include "core/process.hpp"
#include "core/random.hpp"

#include <cmath>
#include <fmt/format.h>

namespace moran {

std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::MoranComposite: return "moran";
    case EventKind::Birth: return "birth";
    case EventKind::Death: return "death";
    }
    return "unknown";
}

std::string_view to_string(Outcome outcome)
{
    switch (outcome) {
    case Outcome::FixatedA: return "fixated-a";
    case Outcome::FixatedB: return "fixated-b";
    case Outcome::Truncated: return "truncated";
    }
    return "unknown";
}

PreparedModel::PreparedModel(Model model, InitialCondition init) : model_(std::move(model)), init_(std::move(init))
{
    if (const auto* wm = std::get_if<WellMixedModel>(&model_)) {
        const auto* state = std::get_if<PopulationState>(&init_);
        if (!state)
            throw DomainError("well-mixed models need an explicit (a, b) initial state");
        validate_process(wm->process, *state);
        if (state->absorbing())
            throw DomainError(fmt::format("initial state ({}, {}) is absorbing", state->a, state->b));
        if (wm->game)
            (void)game_fitness(*wm->game, *state);
    } else {
        const auto& gm = std::get<GraphModel>(model_);
        topology_ = std::make_shared<const GraphTopology>(GraphTopology::build(gm.graph));
        topology_->check_compatible(gm.rule);
        const auto* layout = std::get_if<Layout>(&init_);
        if (!layout)
            throw DomainError("graph models need a layout as initial condition");
        const auto counts = initial_occupancy(topology_, *layout).counts();
        if (counts.absorbing())
            throw DomainError(fmt::format("initial occupancy ({}, {}) is fixated", counts.a, counts.b));
    }
}

std::int64_t PreparedModel::initial_size() const
{
    if (is_graph())
        return topology_->size();
    return std::get<PopulationState>(init_).size();
}

std::uint64_t default_max_steps(std::int64_t N)
{
    return 50u * static_cast<std::uint64_t>(N) * static_cast<std::uint64_t>(N);
}

namespace {

Outcome outcome_of(PopulationState s)
{
    if (s.b == 0)
        return Outcome::FixatedA;
    if (s.a == 0)
        return Outcome::FixatedB;
    return Outcome::Truncated;
}

Type draw(const BirthProbabilities& p, RandomStream& rng)
{
    return rng.bernoulli(p.p_A) ? Type::A : Type::B;
}

class WellMixedRunner {
public:
    WellMixedRunner(const WellMixedModel& model, double r, RandomStream& rng, EventLog& log)
        : model_(model), r_(r), rng_(rng), log_(log)
    {
    }

    PopulationState step(std::uint64_t index, PopulationState s)
    {
        const Fitness f = model_.game ? game_fitness(*model_.game, s) : constant_fitness(r_);
        switch (model_.process.tag) {
        case ProcessKind::Tag::Moran: return moran(index, s, f);
        case ProcessKind::Tag::SeparatedBirthDeath: {
            const auto grown = birth(index, s, s, f);
            const auto pool = model_.process.death_pool == DeathPool::Enlarged ? grown : s;
            return death(index, grown, pool);
        }
        case ProcessKind::Tag::SeparatedDeathBirth: {
            const auto shrunk = death(index, s, s);
            return birth(index, shrunk, shrunk, f);
        }
        case ProcessKind::Tag::VariableSize: {
            const double p_death = variable_size_death_prob(s.size(), model_.process.K, model_.process.s);
            return rng_.bernoulli(p_death) ? death(index, s, s) : birth(index, s, s, f);
        }
        }
        throw DomainError("unknown process kind");
    }

private:
    PopulationState moran(std::uint64_t index, PopulationState s, Fitness f)
    {
        // Reproducer by fitness, victim uniform over the N current individuals: the
        // resulting state change has exactly the moran_transition_probs distribution.
        const Type parent = draw(birth_probabilities(s, f), rng_);
        const Type victim = draw(death_probabilities(s), rng_);
        const auto post = s.with_added(parent, 1).with_added(victim, -1);
        log_.events.push_back({index, EventKind::MoranComposite, s, parent, s, post, post == s, -1, -1});
        return post;
    }

    PopulationState birth(std::uint64_t index, PopulationState pre, PopulationState pool, Fitness f)
    {
        const Type parent = draw(birth_probabilities(pool, f), rng_);
        const auto post = pre.with_added(parent, 1);
        log_.events.push_back({index, EventKind::Birth, pool, parent, pre, post, false, -1, -1});
        return post;
    }

    PopulationState death(std::uint64_t index, PopulationState pre, PopulationState pool)
    {
        const Type victim = draw(death_probabilities(pool), rng_);
        const auto post = pre.with_added(victim, -1);
        log_.events.push_back({index, EventKind::Death, pool, victim, pre, post, false, -1, -1});
        return post;
    }

    const WellMixedModel& model_;
    double r_;
    RandomStream& rng_;
    EventLog& log_;
};

} // namespace

EventLog run_trajectory(const PreparedModel& prepared, double r, std::uint64_t seed, std::uint64_t max_steps)
{
    if (max_steps == 0)
        throw DomainError("max_steps must be at least 1");
    if (!(r >= 0.0) || !std::isfinite(r))
        throw DomainError("relative fitness r must be finite and nonnegative");

    EventLog log;
    log.model = prepared.model();
    log.true_r = r;
    log.init = prepared.init();
    log.seed = seed;
    log.max_steps = max_steps;

    RandomStream rng(seed);

    if (const auto* wm = std::get_if<WellMixedModel>(&prepared.model())) {
        auto state = std::get<PopulationState>(prepared.init());
        log.initial_state = state;
        WellMixedRunner runner(*wm, r, rng, log);
        while (!state.absorbing() && log.steps < max_steps)
            state = runner.step(log.steps++, state);
        log.outcome = outcome_of(state);
        return log;
    }

    const auto& gm = std::get<GraphModel>(prepared.model());
    auto pop = initial_occupancy(prepared.topology(), std::get<Layout>(prepared.init()));
    log.initial_occupancy = pop.occupancy;
    auto state = pop.counts();
    log.initial_state = state;
    const Fitness f = constant_fitness(r);
    while (!state.absorbing() && log.steps < max_steps) {
        const auto pre = state;
        const auto step = gm.rule == UpdateRule::BirthDeath ? bd_step(pop, f, rng) : db_step(pop, f, rng);
        state = pop.counts();
        log.events.push_back({log.steps, EventKind::Birth, step.pool, step.winner, pre, state, false, step.parent,
                              step.victim});
        ++log.steps;
    }
    log.outcome = outcome_of(state);
    return log;
}

EventLog run_trajectory(const Model& model, const InitialCondition& init, double r, std::uint64_t seed,
                        std::uint64_t max_steps)
{
    return run_trajectory(PreparedModel(model, init), r, seed, max_steps);
}

std::vector<SelectionEvent> sample_events(const EventLog& log, std::size_t k, std::uint64_t seed)
{
    if (k == 0)
        throw DomainError("sample size must be at least 1");
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < log.events.size(); ++i)
        if (log.events[i].informative_kind())
            candidates.push_back(i);

    std::vector<SelectionEvent> out;
    out.reserve(std::min(k, candidates.size()));
    if (candidates.size() <= k) {
        for (auto i : candidates)
            out.push_back(log.events[i]);
        return out;
    }
    // Selection sampling (Knuth, TAOCP 3.4.2 Algorithm S): order-preserving.
    RandomStream rng(seed, 0x53414D50u);
    std::size_t needed = k;
    for (std::size_t j = 0; j < candidates.size() && needed > 0; ++j) {
        const std::size_t remaining = candidates.size() - j;
        if (rng.below(remaining) < needed) {
            out.push_back(log.events[candidates[j]]);
            --needed;
        }
    }
    return out;
}

void check_replay(const EventLog& log)
{
    auto fail = [](std::size_t i, std::string_view what) {
        throw DomainError(fmt::format("replay mismatch at event {}: {}", i, what));
    };

    auto state = log.initial_state;
    std::vector<Type> occupancy = log.initial_occupancy;
    const bool graph = std::holds_alternative<GraphModel>(log.model);
    if (graph) {
        PopulationState counted;
        for (Type t : occupancy)
            (t == Type::A ? counted.a : counted.b) += 1;
        if (counted != state)
            fail(0, "initial occupancy does not match initial state");
    }

    for (std::size_t i = 0; i < log.events.size(); ++i) {
        const auto& e = log.events[i];
        if (e.pre_state != state)
            fail(i, "pre_state does not continue the chain");
        if (e.pool.count(e.winner) < 1)
            fail(i, "winner type absent from pool");

        PopulationState expected = state;
        if (graph) {
            if (e.victim < 0 || e.parent < 0 || static_cast<std::size_t>(e.victim) >= occupancy.size() ||
                static_cast<std::size_t>(e.parent) >= occupancy.size())
                fail(i, "graph event without valid parent/victim");
            if (occupancy[static_cast<std::size_t>(e.parent)] != e.winner)
                fail(i, "parent vertex type differs from winner");
            expected = expected.with_added(occupancy[static_cast<std::size_t>(e.victim)], -1).with_added(e.winner, 1);
            occupancy[static_cast<std::size_t>(e.victim)] = e.winner;
        } else {
            switch (e.kind) {
            case EventKind::Birth: expected = state.with_added(e.winner, 1); break;
            case EventKind::Death: expected = state.with_added(e.winner, -1); break;
            case EventKind::MoranComposite:
                if (e.stayed) {
                    expected = state;
                } else {
                    expected = state.with_added(e.winner, 1).with_added(other(e.winner), -1);
                }
                break;
            }
        }
        if (e.post_state != expected)
            fail(i, "post_state inconsistent with the event");
        if (e.kind == EventKind::MoranComposite && e.stayed != (e.post_state == e.pre_state))
            fail(i, "stayed flag inconsistent with state change");
        state = e.post_state;
    }

    const auto final_outcome = outcome_of(state);
    if (final_outcome != Outcome::Truncated && log.outcome != final_outcome)
        throw DomainError("outcome does not match the final state");
    if (final_outcome == Outcome::Truncated && log.outcome != Outcome::Truncated)
        throw DomainError("log claims fixation but the final state is interior");
}

TrajectoryStats trajectory_stats(std::span<const TrajectoryOutline> batch)
{
    TrajectoryStats st;
    st.n = batch.size();
    if (batch.empty())
        throw DomainError("trajectory_stats: empty batch");
    double sum = 0.0;
    double sum_fixated = 0.0;
    std::size_t fixated_a = 0;
    std::size_t fixated_b = 0;
    for (const auto& t : batch) {
        sum += static_cast<double>(t.steps);
        if (t.outcome == Outcome::Truncated) {
            ++st.truncated;
        } else {
            sum_fixated += static_cast<double>(t.steps);
            (t.outcome == Outcome::FixatedA ? fixated_a : fixated_b) += 1;
        }
    }
    const double n = static_cast<double>(st.n);
    st.mean_length = sum / n;
    double ss = 0.0;
    for (const auto& t : batch) {
        const double d = static_cast<double>(t.steps) - st.mean_length;
        ss += d * d;
    }
    st.std_length = st.n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    const auto n_fixated = fixated_a + fixated_b;
    st.mean_length_fixated = n_fixated > 0 ? sum_fixated / static_cast<double>(n_fixated) : 0.0;
    st.fixated_a_fraction = static_cast<double>(fixated_a) / n;
    st.fixated_b_fraction = static_cast<double>(fixated_b) / n;
    return st;
}

TrajectoryStats trajectory_stats(std::span<const EventLog> batch)
{
    std::vector<TrajectoryOutline> outlines;
    outlines.reserve(batch.size());
    for (const auto& log : batch)
        outlines.push_back({log.steps, log.outcome});
    return trajectory_stats(outlines);
}

} // namespace moran
