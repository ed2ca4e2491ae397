#pragma once

#include <cstdint>
#include <string_view>

namespace moran {

enum class Type : std::uint8_t { A = 0, B = 1 };

constexpr char type_char(Type t) { return t == Type::A ? 'A' : 'B'; }
constexpr Type other(Type t) { return t == Type::A ? Type::B : Type::A; }

/// Counts of the two replicator types in a population or selection pool.
struct PopulationState {
    std::int64_t a = 0;
    std::int64_t b = 0;

    constexpr std::int64_t size() const { return a + b; }
    constexpr bool absorbing() const { return a == 0 || b == 0; }
    constexpr bool interior() const { return a > 0 && b > 0; }
    constexpr std::int64_t count(Type t) const { return t == Type::A ? a : b; }

    constexpr PopulationState with_added(Type t, std::int64_t delta) const {
        return t == Type::A ? PopulationState{a + delta, b} : PopulationState{a, b + delta};
    }

    friend constexpr bool operator==(const PopulationState&, const PopulationState&) = default;
};

/// 2x2 payoff matrix. Rows are the focal type, columns the opponent:
///
///           A      B
///     A   w_AA   w_AB
///     B   w_BA   w_BB
///
/// The constant landscape f_A = 1, f_B = r is the matrix (1, 1; r, r).
struct GameMatrix {
    double w_AA = 1.0;
    double w_AB = 1.0;
    double w_BA = 1.0;
    double w_BB = 1.0;

    static constexpr GameMatrix constant(double r) { return {1.0, 1.0, r, r}; }

    friend constexpr bool operator==(const GameMatrix&, const GameMatrix&) = default;
};

struct Fitness {
    double f_A = 1.0;
    double f_B = 1.0;
};

/// Death event pool rule for the separated birth-death process.
///   ExcludeOffspring: the victim is uniform over the N individuals present before the
///                     birth, so one cycle has exactly the Moran state marginal.
///   Enlarged:         the victim is uniform over all N+1 individuals, newborn included.
enum class DeathPool : std::uint8_t { ExcludeOffspring, Enlarged };

struct ProcessKind {
    enum class Tag : std::uint8_t { Moran, SeparatedBirthDeath, SeparatedDeathBirth, VariableSize };

    Tag tag = Tag::Moran;
    // VariableSize: carrying capacity 2K, sigmoid inflection at K with steepness s.
    std::int64_t K = 0;
    double s = 0.0;
    DeathPool death_pool = DeathPool::ExcludeOffspring;

    friend bool operator==(const ProcessKind&, const ProcessKind&) = default;
};

std::string_view to_string(ProcessKind::Tag tag);

} // namespace moran
