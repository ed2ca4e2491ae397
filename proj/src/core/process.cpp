#include "core/process.hpp"

#include "core/errors.hpp"

#include <cmath>
#include <fmt/format.h>

namespace moran {

std::string_view to_string(ProcessKind::Tag tag)
{
    switch (tag) {
    case ProcessKind::Tag::Moran: return "moran";
    case ProcessKind::Tag::SeparatedBirthDeath: return "separated-bd";
    case ProcessKind::Tag::SeparatedDeathBirth: return "separated-db";
    case ProcessKind::Tag::VariableSize: return "variable-size";
    }
    return "unknown";
}

namespace {

void require_interior(PopulationState s, const char* what)
{
    if (s.a < 0 || s.b < 0)
        throw DomainError(fmt::format("{}: negative count in state ({}, {})", what, s.a, s.b));
    if (!s.interior())
        throw DomainError(fmt::format("{}: state ({}, {}) is absorbing", what, s.a, s.b));
}

} // namespace

Fitness game_fitness(const GameMatrix& m, PopulationState state)
{
    require_interior(state, "game_fitness");
    const auto N = state.size();
    if (N < kMinPopulation)
        throw DomainError(fmt::format("game_fitness: population size {} below {}", N, kMinPopulation));
    for (double w : {m.w_AA, m.w_AB, m.w_BA, m.w_BB})
        if (!std::isfinite(w) || w < 0.0)
            throw DomainError("game_fitness: matrix entries must be finite and nonnegative");

    const double a = static_cast<double>(state.a);
    const double b = static_cast<double>(state.b);
    const double denom = static_cast<double>(N - 1);
    const Fitness f{(m.w_AA * (a - 1.0) + m.w_AB * b) / denom, (m.w_BA * a + m.w_BB * (b - 1.0)) / denom};
    if (!(f.f_A > 0.0) || !(f.f_B > 0.0))
        throw DomainError(fmt::format("game_fitness: nonpositive fitness ({}, {}) at ({}, {})", f.f_A, f.f_B,
                                      state.a, state.b));
    return f;
}

MoranTransition moran_transition_probs(PopulationState state, Fitness f)
{
    require_interior(state, "moran_transition_probs");
    const double a = static_cast<double>(state.a);
    const double b = static_cast<double>(state.b);
    const double total_fitness = a * f.f_A + b * f.f_B;
    if (!(total_fitness > 0.0))
        throw DomainError("moran_transition_probs: total fitness must be positive");
    const double n = a + b;

    MoranTransition t;
    t.up = (a * f.f_A / total_fitness) * (b / n);
    t.down = (b * f.f_B / total_fitness) * (a / n);
    t.stay = 1.0 - (t.up + t.down);
    return t;
}

BirthProbabilities birth_probabilities(PopulationState pool, Fitness f)
{
    if (pool.a < 0 || pool.b < 0 || pool.size() == 0)
        throw DomainError(fmt::format("birth_probabilities: empty or invalid pool ({}, {})", pool.a, pool.b));
    if (pool.b == 0)
        return {1.0, 0.0};
    if (pool.a == 0)
        return {0.0, 1.0};
    const double wa = static_cast<double>(pool.a) * f.f_A;
    const double wb = static_cast<double>(pool.b) * f.f_B;
    if (!(wa + wb > 0.0))
        throw DomainError("birth_probabilities: total pool fitness must be positive");
    const double p_A = wa / (wa + wb);
    return {p_A, 1.0 - p_A};
}

BirthProbabilities death_probabilities(PopulationState pool)
{
    return birth_probabilities(pool, Fitness{1.0, 1.0});
}

double fixation_probability(double r, std::int64_t N, std::int64_t b)
{
    if (!(r >= 0.0) || !std::isfinite(r))
        throw DomainError("fixation_probability: r must be finite and nonnegative");
    if (b < 1 || b > N - 1)
        throw DomainError(fmt::format("fixation_probability: need 1 <= b <= N-1, got b={} N={}", b, N));
    if (r == 0.0)
        return 0.0;
    if (std::abs(r - 1.0) < kFixationNeutralEpsilon)
        return static_cast<double>(b) / static_cast<double>(N);
    // expm1/log keeps precision for r near (but not within epsilon of) 1.
    const double log_inv_r = -std::log(r);
    return std::expm1(static_cast<double>(b) * log_inv_r) / std::expm1(static_cast<double>(N) * log_inv_r);
}

double variable_size_death_prob(std::int64_t N, std::int64_t K, double s)
{
    if (K < 2 || !(s > 0.0))
        throw DomainError("variable_size_death_prob: need K >= 2 and s > 0");
    if (N < kMinPopulation || N > 2 * K)
        throw DomainError(fmt::format("variable_size_death_prob: N={} outside [3, {}]", N, 2 * K));
    if (N == 2 * K)
        return 1.0;
    if (N == kMinPopulation)
        return 0.0;
    return 1.0 / (1.0 + std::exp(-static_cast<double>(N - K) / s));
}

MoranTransition separated_cycle_probs(PopulationState state, Fitness fitness, DeathPool pool)
{
    require_interior(state, "separated_cycle_probs");
    const auto birth = birth_probabilities(state, fitness);

    MoranTransition t;
    for (Type parent : {Type::A, Type::B}) {
        const auto grown = state.with_added(parent, 1);
        const auto death_pool = pool == DeathPool::Enlarged ? grown : state;
        const auto death = death_probabilities(death_pool);
        // A-birth then B-death moves up; B-birth then A-death moves down.
        if (parent == Type::A)
            t.up += birth.p_A * death.p_B;
        else
            t.down += birth.p_B * death.p_A;
    }
    t.stay = 1.0 - (t.up + t.down);
    return t;
}

void validate_process(const ProcessKind& kind, PopulationState initial)
{
    if (initial.a < 0 || initial.b < 0)
        throw DomainError("initial state has a negative count");
    const auto N = initial.size();
    if (N < kMinPopulation)
        throw DomainError(fmt::format("initial population size {} is below the minimum {}", N, kMinPopulation));
    if (kind.tag == ProcessKind::Tag::VariableSize) {
        if (kind.K < 2)
            throw DomainError(fmt::format("variable-size process needs K >= 2, got {}", kind.K));
        if (2 * kind.K < N)
            throw DomainError(fmt::format("carrying capacity 2K={} is below initial size {}", 2 * kind.K, N));
        if (!(kind.s > 0.0))
            throw DomainError("variable-size process needs sigmoid steepness s > 0");
    }
}

} // namespace moran
