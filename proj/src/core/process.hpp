#pragma once

#include "core/population.hpp"

#include <cstdint>

namespace moran {

inline constexpr double kFixationNeutralEpsilon = 1e-9;
inline constexpr std::int64_t kMinPopulation = 3;

struct MoranTransition {
    double up = 0.0;   // (a, b) -> (a+1, b-1)
    double down = 0.0; // (a, b) -> (a-1, b+1)
    double stay = 0.0;
};

struct BirthProbabilities {
    double p_A = 0.0;
    double p_B = 0.0;

    double of(Type t) const { return t == Type::A ? p_A : p_B; }
};

/// Frequency-dependent fitness induced by a game matrix at an interior state with N >= 3.
Fitness game_fitness(const GameMatrix& matrix, PopulationState state);

/// Fitness for the constant landscape f_A = 1, f_B = r.
constexpr Fitness constant_fitness(double r) { return {1.0, r}; }

MoranTransition moran_transition_probs(PopulationState state, Fitness fitness);

/// Fitness-proportionate choice of reproducer within a pool. This is the likelihood atom
/// for every observed birth, well-mixed or on a graph.
BirthProbabilities birth_probabilities(PopulationState pool, Fitness fitness);

/// Uniform removal probabilities within a pool.
BirthProbabilities death_probabilities(PopulationState pool);

/// Probability that B fixates from b of N individuals when B has relative fitness r.
double fixation_probability(double r, std::int64_t N, std::int64_t b);

/// Death probability per step of the variable-size process with carrying capacity 2K.
double variable_size_death_prob(std::int64_t N, std::int64_t K, double s);

/// Default sigmoid steepness for a carrying-capacity half-point K.
constexpr double default_sigmoid_steepness(std::int64_t K) { return static_cast<double>(K) / 5.0; }

/// Exact post-cycle state distribution of one separated birth-death cycle from an
/// interior state: birth in the current population, then the death rule of `pool`.
MoranTransition separated_cycle_probs(PopulationState state, Fitness fitness, DeathPool pool);

/// Throws DomainError if `kind` cannot start from `initial`.
void validate_process(const ProcessKind& kind, PopulationState initial);

} // namespace moran
